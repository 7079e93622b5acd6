use alloc::vec::Vec;

use super::frame::orthonormal_completion;
use super::mat::{CMatrix, Mat, C64, ZERO};
use crate::error::{Error, Result};

/// `T = left · diag(singular_values) · right*`.
#[derive(Clone, Debug)]
pub struct SingularDecomposition {
    pub left: CMatrix,
    /// Non-increasing, non-negative.
    pub singular_values: Vec<f64>,
    pub right: CMatrix,
}

impl SingularDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.left.dim();
        let scaled = Mat::from_fn(n, n, |i, j| self.left[(i, j)] * self.singular_values[j]);
        CMatrix::try_from(scaled.matmul_adjoint(self.right.as_mat()))
            .expect("finite factors give a finite product")
    }

    /// Number of singular values strictly above `rank_tol·σ₁`.
    pub fn numerical_rank(&self, rank_tol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .take_while(|&&s| s > rank_tol * top)
            .count()
    }
}

pub const SVD_MAX_SWEEPS: usize = 60;

/// One-sided (Hestenes) Jacobi SVD.
///
/// Columns are rotated pairwise until mutually orthogonal to working
/// precision; column norms are the singular values. Left vectors of tiny
/// columns are re-orthogonalized and, if lost, completed to a unitary.
pub fn svd(t: &CMatrix) -> Result<SingularDecomposition> {
    let n = t.dim();
    // an exact power-of-two scaling keeps the iteration away from underflow
    let exponent = match t.as_mat().max_abs() {
        m if m > 0.0 => libm::frexp(m).1,
        _ => 0,
    };
    let mut a = Mat::from_fn(n, n, |i, j| {
        let z = t[(i, j)];
        C64::new(libm::ldexp(z.re, -exponent), libm::ldexp(z.im, -exponent))
    });
    let mut v = Mat::identity(n);
    let tol = 4.0 * f64::EPSILON;
    // columns this small are numerically zero and are left alone
    let negligible = {
        let floor = f64::EPSILON * f64::EPSILON * a.frobenius_norm();
        floor * floor
    };

    let mut converged = n < 2;
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for i in 0..n {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    alpha += ap.norm_sqr();
                    beta += aq.norm_sqr();
                    gamma += ap.conj() * aq;
                }
                let g = gamma.norm();
                if alpha <= negligible
                    || beta <= negligible
                    || g <= tol * libm::sqrt(alpha) * libm::sqrt(beta)
                {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let ps = phase.conj() * s;
                let pc = phase.conj() * c;
                for m in [&mut a, &mut v] {
                    for i in 0..n {
                        let xp = m[(i, p)];
                        let xq = m[(i, q)];
                        m[(i, p)] = xp * c - xq * ps;
                        m[(i, q)] = xp * s + xq * pc;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence {
            hash: t.digest_hex(),
            sweeps: SVD_MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| libm::sqrt((0..n).map(|i| a[(i, j)].norm_sqr()).sum::<f64>()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep column order, so the result is deterministic
    order.sort_by(|&x, &y| {
        norms[y]
            .partial_cmp(&norms[x])
            .unwrap_or(core::cmp::Ordering::Equal)
    });

    let singular_values: Vec<f64> = order
        .iter()
        .map(|&j| libm::ldexp(norms[j], exponent))
        .collect();
    let right = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);

    let mut left = Mat::zeros(n, n);
    let mut kept = 0usize;
    let mut missing = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        let mut u: Vec<C64> = if sigma > 0.0 {
            (0..n).map(|i| a[(i, j)] / sigma).collect()
        } else {
            alloc::vec![ZERO; n]
        };
        // two rounds of Gram-Schmidt against the accepted vectors
        for _ in 0..2 {
            for k in 0..slot {
                if missing.contains(&k) {
                    continue;
                }
                let dot = (0..n).fold(ZERO, |acc, i| acc + left[(i, k)].conj() * u[i]);
                for (i, ui) in u.iter_mut().enumerate() {
                    *ui -= left[(i, k)] * dot;
                }
            }
        }
        let norm = libm::sqrt(u.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if norm > 0.5 {
            u.iter_mut().for_each(|z| *z /= norm);
            left.set_column(slot, &u);
            kept += 1;
        } else {
            missing.push(slot);
        }
    }
    if !missing.is_empty() {
        let present: Vec<usize> = (0..n).filter(|s| !missing.contains(s)).collect();
        let basis = Mat::from_fn(n, kept, |i, j| left[(i, present[j])]);
        let full = orthonormal_completion(&basis);
        for (extra, &slot) in missing.iter().enumerate() {
            left.set_column(slot, &full.column(kept + extra));
        }
    }

    Ok(SingularDecomposition {
        left: CMatrix::try_from(left)?,
        singular_values,
        right: CMatrix::try_from(right)?,
    })
}
