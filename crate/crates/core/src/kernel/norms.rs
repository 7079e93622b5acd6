use super::mat::{CMatrix, Mat, C64, ZERO};

/// `tr(T)/n`: the normalized trace, with `τ(I) = 1`.
pub fn normalized_trace(t: &CMatrix) -> C64 {
    let n = t.dim();
    let sum = (0..n).fold(ZERO, |acc, i| acc + t[(i, i)]);
    sum / n as f64
}

/// `‖T‖₂ = τ(T*T)^{1/2}`, i.e. the Frobenius norm divided by `√n`.
pub fn trace_norm2(t: &CMatrix) -> f64 {
    normalized_frobenius(t.as_mat(), t.dim())
}

/// Frobenius norm of `m` scaled by `1/√n`; `n` is the ambient dimension.
pub(crate) fn normalized_frobenius(m: &Mat, n: usize) -> f64 {
    libm::sqrt(m.frobenius_norm_sqr() / n as f64)
}

const MAX_SQUARINGS: usize = 64;

/// Largest singular value of `T`.
///
/// Power iteration on `B = T*T`, accelerated by repeated squaring of the
/// trace-normalized `B` until it is numerically rank one; the start vector is
/// the largest column of the squared matrix, and the estimate is the Rayleigh
/// quotient against the original `B`. No SVD is involved.
pub fn operator_norm(t: &CMatrix) -> f64 {
    let b = t.as_mat().adjoint_matmul(t.as_mat());
    let n = b.rows();
    let tr: f64 = (0..n).map(|i| b[(i, i)].re).sum();
    if tr == 0.0 {
        return 0.0;
    }
    let mut m = b.scale_real(1.0 / tr);
    for _ in 0..MAX_SQUARINGS {
        let sq = m.matmul(&m);
        let tr_sq: f64 = (0..n).map(|i| sq[(i, i)].re).sum();
        if !(tr_sq > 0.0) {
            break;
        }
        // trace(M²)/trace(M)² = 1 exactly for a rank-one Hermitian M
        let next = sq.scale_real(1.0 / tr_sq);
        let stalled = (&next - &m).frobenius_norm() < 1e-15;
        m = next;
        if tr_sq >= 1.0 - 1e-15 || stalled {
            break;
        }
    }

    let mut v = (0..n)
        .map(|j| {
            let col = m.column(j);
            let w: f64 = col.iter().map(|z| z.norm_sqr()).sum();
            (w, col)
        })
        .fold((-1.0, alloc::vec::Vec::new()), |best, cand| {
            if cand.0 > best.0 {
                cand
            } else {
                best
            }
        })
        .1;
    normalize(&mut v);
    for _ in 0..3 {
        let mut w = mat_vec(&m, &v);
        if normalize(&mut w) == 0.0 {
            break;
        }
        v = w;
    }
    let bv = mat_vec(&b, &v);
    let rayleigh: f64 = v.iter().zip(&bv).map(|(x, y)| (x.conj() * y).re).sum();
    libm::sqrt(rayleigh.max(0.0))
}

fn mat_vec(m: &Mat, v: &[C64]) -> alloc::vec::Vec<C64> {
    (0..m.rows())
        .map(|i| m.row(i).iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a * b))
        .collect()
}

fn normalize(v: &mut [C64]) -> f64 {
    let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
    norm
}
