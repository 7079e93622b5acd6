//! Orthonormal frames: the n×k isometries whose ranges carry projections.

use alloc::vec::Vec;

use super::mat::{Mat, C64, ONE, ZERO};

/// Orthonormalizes the columns of `m` by classical Gram-Schmidt applied
/// twice, dropping columns whose residual falls below `drop_tol` times their
/// original norm. Kept columns have a positive real `R` diagonal, so a
/// full-rank input gives the unique QR `Q` factor.
pub fn orthonormalize(m: &Mat, drop_tol: f64) -> Mat {
    let n = m.rows();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut v = m.column(j);
        let original = norm(&v);
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for b in &basis {
                let dot = b
                    .iter()
                    .zip(&v)
                    .fold(ZERO, |acc, (x, y)| acc + x.conj() * y);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= bi * dot;
                }
            }
        }
        let r = norm(&v);
        if r > drop_tol * original {
            v.iter_mut().for_each(|z| *z /= r);
            basis.push(v);
        }
    }
    let k = basis.len();
    Mat::from_fn(n, k, |i, j| basis[j][i])
}

/// QR retraction: the `Q` factor of a full-rank n×k matrix.
pub fn qr_frame(m: &Mat) -> Mat {
    let q = orthonormalize(m, 1e-13);
    debug_assert_eq!(q.cols(), m.cols(), "qr_frame needs a full-rank input");
    q
}

/// Extends an orthonormal n×k frame to an n×n unitary whose leading `k`
/// columns are the frame. Completion vectors are drawn from the standard
/// basis, largest residual first.
pub fn orthonormal_completion(frame: &Mat) -> Mat {
    let n = frame.rows();
    let mut basis: Vec<Vec<C64>> = (0..frame.cols()).map(|j| frame.column(j)).collect();
    while basis.len() < n {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for e in 0..n {
            let mut v = alloc::vec![ZERO; n];
            v[e] = ONE;
            for _ in 0..2 {
                for b in &basis {
                    let dot = b
                        .iter()
                        .zip(&v)
                        .fold(ZERO, |acc, (x, y)| acc + x.conj() * y);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= bi * dot;
                    }
                }
            }
            let r = norm(&v);
            if best.as_ref().is_none_or(|(br, _)| r > *br) {
                best = Some((r, v));
            }
        }
        let (r, mut v) = best.expect("n > 0");
        v.iter_mut().for_each(|z| *z /= r);
        basis.push(v);
    }
    Mat::from_fn(n, n, |i, j| basis[j][i])
}

fn norm(v: &[C64]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// `‖V*V − I_k‖_F`.
pub fn frame_defect(v: &Mat) -> f64 {
    let g = v.adjoint_matmul(v);
    (&g - &Mat::identity(v.cols())).frobenius_norm()
}
