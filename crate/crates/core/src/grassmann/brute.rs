//! Exhaustive grid oracle for `n ≤ 3`.
//!
//! A rank-one projection is `vv*` with `v` a unit vector whose first
//! coordinate is real and non-negative (the global phase is irrelevant):
//!
//! * `n = 2`: `v = (cos θ, e^{iφ} sin θ)`
//! * `n = 3`: `v = (cos θ₁, e^{iφ₁} sin θ₁ cos θ₂, e^{iφ₂} sin θ₁ sin θ₂)`
//!
//! with `θ ∈ [0, π/2]` sampled at `density` points including both ends and
//! `φ ∈ [0, 2π)` at `density` equispaced points. Rank two in dimension three
//! uses the complement `I − vv*`. The grid minimum exceeds the true minimum
//! by `O(1/density)` at worst (`O(1/density²)` at a smooth interior
//! minimum). Cost is `density²` for `n = 2` and `density⁴` for `n = 3`.

use core::f64::consts::{FRAC_PI_2, PI};

use super::ObjectiveKind;
use crate::error::{Error, Result};
use crate::kernel::{CMatrix, C64, ONE, ZERO};

const MAX_N: usize = 3;

type Small = [[C64; MAX_N]; MAX_N];

fn mul(a: &Small, b: &Small, n: usize) -> Small {
    let mut out = [[ZERO; MAX_N]; MAX_N];
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for l in 0..n {
                acc += a[i][l] * b[l][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// `‖C‖_F²/n` for the projection `p`.
fn defect_sqr(t: &Small, p: &Small, n: usize, kind: ObjectiveKind) -> f64 {
    let tp = mul(t, p, n);
    let other = match kind {
        ObjectiveKind::Commutator => mul(p, t, n),
        ObjectiveKind::Invariance => mul(p, &tp, n),
    };
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += (tp[i][j] - other[i][j]).norm_sqr();
        }
    }
    sum / n as f64
}

fn projection(v: &[C64], n: usize, complement: bool) -> Small {
    let mut p = [[ZERO; MAX_N]; MAX_N];
    for i in 0..n {
        for j in 0..n {
            let outer = v[i] * v[j].conj();
            p[i][j] = if !complement {
                outer
            } else if i == j {
                ONE - outer
            } else {
                -outer
            };
        }
    }
    p
}

/// Grid minimum of the objective over rank-`k` projections, `n ≤ 3`.
pub fn brute_force_distance(
    t: &CMatrix,
    k: usize,
    kind: ObjectiveKind,
    grid_density: usize,
) -> Result<f64> {
    let n = t.dim();
    if n > MAX_N {
        return Err(Error::BruteForceTooLarge { n });
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(alloc::format!(
            "rank {k} must lie in 1..{n}"
        )));
    }
    if grid_density < 2 {
        return Err(Error::InvalidArgument(
            "grid density must be at least 2".into(),
        ));
    }
    let mut tm = [[ZERO; MAX_N]; MAX_N];
    for (i, row) in tm.iter_mut().enumerate().take(n) {
        for (j, x) in row.iter_mut().enumerate().take(n) {
            *x = t[(i, j)];
        }
    }
    let theta = |i: usize| FRAC_PI_2 * i as f64 / (grid_density - 1) as f64;
    let phase = |j: usize| {
        let phi = 2.0 * PI * j as f64 / grid_density as f64;
        C64::new(libm::cos(phi), libm::sin(phi))
    };
    let complement = k == 2 && n == 3;

    let mut best = f64::INFINITY;
    let mut consider = |v: &[C64]| {
        let p = projection(v, n, complement);
        best = best.min(defect_sqr(&tm, &p, n, kind));
    };
    if n == 2 {
        for i in 0..grid_density {
            let (s, c) = (libm::sin(theta(i)), libm::cos(theta(i)));
            for j in 0..grid_density {
                consider(&[C64::new(c, 0.0), phase(j) * s]);
            }
        }
    } else {
        for i1 in 0..grid_density {
            let (s1, c1) = (libm::sin(theta(i1)), libm::cos(theta(i1)));
            for i2 in 0..grid_density {
                let (s2, c2) = (libm::sin(theta(i2)), libm::cos(theta(i2)));
                for j1 in 0..grid_density {
                    let e1 = phase(j1) * (s1 * c2);
                    for j2 in 0..grid_density {
                        consider(&[C64::new(c1, 0.0), e1, phase(j2) * (s1 * s2)]);
                    }
                }
            }
        }
    }
    Ok(libm::sqrt(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::objective_value;
    use crate::kernel::OrthoProjection;
    use crate::random::SeededStream;

    #[test]
    fn jordan_grid_minimum() {
        let v =
            brute_force_distance(&CMatrix::jordan(2), 1, ObjectiveKind::Commutator, 2000).unwrap();
        assert!((v - 0.5).abs() < 1e-3, "{v}");
        let inv =
            brute_force_distance(&CMatrix::jordan(2), 1, ObjectiveKind::Invariance, 200).unwrap();
        assert!(inv < 1e-6);
    }

    #[test]
    fn diagonal_commutes_with_coordinate_projection() {
        let d = CMatrix::real_diagonal(&[1.0, 2.0]);
        assert!(brute_force_distance(&d, 1, ObjectiveKind::Commutator, 50).unwrap() < 1e-6);
        let d3 = CMatrix::real_diagonal(&[1.0, 2.0, 3.0]);
        for k in [1, 2] {
            assert!(brute_force_distance(&d3, k, ObjectiveKind::Commutator, 9).unwrap() < 1e-6);
        }
    }

    #[test]
    fn grid_minimum_bounds_every_sampled_projection() {
        // the grid never beats a dense random sample by more than its resolution
        let t = SeededStream::new(2, 0).ginibre(3);
        let grid = brute_force_distance(&t, 2, ObjectiveKind::Commutator, 24).unwrap();
        let mut rng = SeededStream::new(2, 1);
        let sampled = (0..2000)
            .map(|_| {
                let p = OrthoProjection::from_frame(&rng.frame(3, 2));
                objective_value(&t, &p, ObjectiveKind::Commutator)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(grid <= sampled + 0.1, "grid {grid} sampled {sampled}");
    }

    #[test]
    fn refuses_large_or_degenerate_inputs() {
        assert!(matches!(
            brute_force_distance(&CMatrix::identity(4), 1, ObjectiveKind::Commutator, 10),
            Err(Error::BruteForceTooLarge { n: 4 })
        ));
        assert!(
            brute_force_distance(&CMatrix::identity(2), 2, ObjectiveKind::Commutator, 10).is_err()
        );
        assert!(
            brute_force_distance(&CMatrix::identity(2), 1, ObjectiveKind::Commutator, 1).is_err()
        );
    }
}
