use super::mat::{CMatrix, Mat, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Inverse by Gaussian elimination with partial pivoting.
pub fn inverse(t: &CMatrix) -> Result<CMatrix> {
    let n = t.dim();
    let mut a = t.as_mat().clone();
    let mut inv = Mat::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| {
                a[(x, col)]
                    .norm()
                    .partial_cmp(&a[(y, col)].norm())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        let pivot = a[(pivot_row, col)];
        if pivot.norm() <= 1e-14 * scale {
            return Err(Error::Singular {
                column: col,
                pivot: pivot.norm(),
            });
        }
        if pivot_row != col {
            for m in [&mut a, &mut inv] {
                for j in 0..n {
                    let tmp = m[(col, j)];
                    m[(col, j)] = m[(pivot_row, j)];
                    m[(pivot_row, j)] = tmp;
                }
            }
        }
        let recip: C64 = ONE / pivot;
        for j in 0..n {
            a[(col, j)] *= recip;
            inv[(col, j)] *= recip;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let ac = a[(col, j)];
                let ic = inv[(col, j)];
                a[(r, j)] -= f * ac;
                inv[(r, j)] -= f * ic;
            }
        }
    }
    CMatrix::try_from(inv)
}
