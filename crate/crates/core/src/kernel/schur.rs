use alloc::vec::Vec;

use super::mat::{CMatrix, Mat, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// `T = Q·U·Q*` with `Q` unitary and `U` upper triangular.
#[derive(Clone, Debug)]
pub struct SchurDecomposition {
    pub q: CMatrix,
    pub u: CMatrix,
    /// Diagonal of `u`, in the order the QR iteration deflated them.
    pub eigenvalues: Vec<C64>,
}

impl SchurDecomposition {
    /// The eigenvector of the `i`-th Schur eigenvalue, unit length.
    ///
    /// Back substitution on `(U - λᵢ)x = 0` with `xᵢ = 1`; requires `λᵢ`
    /// to differ from every earlier diagonal entry.
    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        let n = self.u.dim();
        let lambda = self.eigenvalues[i];
        let mut x = alloc::vec![ZERO; n];
        x[i] = ONE;
        for j in (0..i).rev() {
            let mut acc = ZERO;
            for l in j + 1..=i {
                acc += self.u[(j, l)] * x[l];
            }
            let denom = self.u[(j, j)] - lambda;
            x[j] = -acc / denom;
        }
        let mut v: Vec<C64> = (0..n)
            .map(|r| (0..=i).fold(ZERO, |acc, l| acc + self.q[(r, l)] * x[l]))
            .collect();
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        v.iter_mut().for_each(|z| *z /= norm);
        v
    }
}

/// A 2×2 unitary `G = [[c, s], [-s̄, c]]` with real `c`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Givens {
    pub c: f64,
    pub s: C64,
}

impl Givens {
    /// Rotation with `G·[a; b] = [r; 0]`.
    pub fn zeroing(a: C64, b: C64) -> (Givens, C64) {
        let na = a.norm();
        let nb = b.norm();
        if nb == 0.0 {
            return (Givens { c: 1.0, s: ZERO }, a);
        }
        if na == 0.0 {
            return (Givens { c: 0.0, s: ONE }, b);
        }
        let nu = libm::hypot(na, nb);
        let phase = a / na;
        let g = Givens {
            c: na / nu,
            s: phase * b.conj() / nu,
        };
        (g, phase * nu)
    }

    /// Rows `i, i+1` of `m` become `G·[row_i; row_{i+1}]` over columns `cols`.
    pub fn rotate_rows(&self, m: &mut Mat, i: usize, cols: core::ops::Range<usize>) {
        for j in cols {
            let x = m[(i, j)];
            let y = m[(i + 1, j)];
            m[(i, j)] = x * self.c + self.s * y;
            m[(i + 1, j)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Columns `i, i+1` of `m` become `[col_i, col_{i+1}]·G*` over `rows`.
    pub fn rotate_cols_adjoint(&self, m: &mut Mat, i: usize, rows: core::ops::Range<usize>) {
        for r in rows {
            let x = m[(r, i)];
            let y = m[(r, i + 1)];
            m[(r, i)] = x * self.c + y * self.s.conj();
            m[(r, i + 1)] = -self.s * x + y * self.c;
        }
    }
}

/// QR steps allowed per unit of dimension.
pub const SCHUR_SWEEPS_PER_DIM: usize = 60;
const EXCEPTIONAL_SHIFT_PERIOD: usize = 10;

/// Complex Schur decomposition: Householder reduction to Hessenberg form,
/// then single-shift QR with Wilkinson shifts and deflation.
///
/// Deterministic; an exceptional shift is taken every tenth step without
/// deflation. Fails after `60·n` QR steps.
pub fn schur(t: &CMatrix) -> Result<SchurDecomposition> {
    let n = t.dim();
    let mut h = t.as_mat().clone();
    let mut q = Mat::identity(n);
    hessenberg_in_place(&mut h, &mut q);

    let eps = f64::EPSILON;
    let small = f64::MIN_POSITIVE / eps;
    let budget = SCHUR_SWEEPS_PER_DIM * n.max(1);
    let mut steps = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n.saturating_sub(1);

    while hi > 0 {
        // find the top of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= small || sub <= eps * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        steps += 1;
        since_deflation += 1;
        if steps > budget {
            return Err(Error::SchurNoConvergence {
                hash: t.digest_hex(),
                budget,
            });
        }

        let shift = if since_deflation % EXCEPTIONAL_SHIFT_PERIOD == 0 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_step(&mut h, &mut q, lo, hi, shift);
    }

    // strictly lower part is exactly zero by construction; enforce it
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    let u = CMatrix::try_from(h)?;
    let eigenvalues = u.diag();
    Ok(SchurDecomposition {
        q: CMatrix::try_from(q)?,
        u,
        eigenvalues,
    })
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let scale = a.norm() + b.norm() + c.norm() + d.norm();
    if scale == 0.0 {
        return ZERO;
    }
    let (a, b, c, d) = (a / scale, b / scale, c / scale, d / scale);
    let half_tr = (a + d) * 0.5;
    let disc = ((a - half_tr) * (a - half_tr) + b * c).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    let pick = if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    };
    pick * scale
}

/// One implicit single-shift QR sweep on the active window `lo..=hi`,
/// applied to the full matrix so that `h` stays a Schur-form witness.
fn qr_step(h: &mut Mat, q: &mut Mat, lo: usize, hi: usize, shift: C64) {
    let n = h.rows();
    for i in lo..hi {
        let g = if i == lo {
            Givens::zeroing(h[(lo, lo)] - shift, h[(lo + 1, lo)]).0
        } else {
            let (g, r) = Givens::zeroing(h[(i, i - 1)], h[(i + 1, i - 1)]);
            h[(i, i - 1)] = r;
            h[(i + 1, i - 1)] = ZERO;
            g
        };
        let col_start = if i == lo { lo } else { i };
        g.rotate_rows(h, i, col_start..n);
        let row_end = (i + 3).min(hi + 1);
        g.rotate_cols_adjoint(h, i, 0..row_end);
        g.rotate_cols_adjoint(q, i, 0..n);
    }
}

/// Reduces `h` to upper Hessenberg form by Hermitian Householder
/// reflectors, accumulating them into `q`.
fn hessenberg_in_place(h: &mut Mat, q: &mut Mat) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = libm::sqrt(x[0].norm_sqr() + tail);
        let phase = if x[0].norm() == 0.0 {
            ONE
        } else {
            x[0] / x[0].norm()
        };
        // u = x + e^{i arg x₀}‖x‖e₁ ; P = I - 2uu*/(u*u), P·x = -e^{i arg x₀}‖x‖e₁
        let mut u = x;
        u[0] += phase * xnorm;
        let unorm2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        let beta = 2.0 / unorm2;

        // h ← P h (rows k+1..n)
        for j in 0..n {
            let dot = u
                .iter()
                .enumerate()
                .fold(ZERO, |acc, (l, ul)| acc + ul.conj() * h[(k + 1 + l, j)]);
            let f = dot * beta;
            for (l, ul) in u.iter().enumerate() {
                h[(k + 1 + l, j)] -= ul * f;
            }
        }
        // h ← h P, q ← q P (columns k+1..n)
        for m in [&mut *h, &mut *q] {
            for i in 0..n {
                let dot = u
                    .iter()
                    .enumerate()
                    .fold(ZERO, |acc, (l, ul)| acc + m[(i, k + 1 + l)] * ul);
                let f = dot * beta;
                for (l, ul) in u.iter().enumerate() {
                    m[(i, k + 1 + l)] -= f * ul.conj();
                }
            }
        }
        h[(k + 1, k)] = -phase * xnorm;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}
