use alloc::format;

use num_rational::Ratio;

use super::frame::frame_defect;
use super::mat::{CMatrix, Mat};
use super::norms::normalized_trace;
use super::svd::svd;
use crate::error::{Error, Result};

/// Exact normalized traces `rank/n`.
pub type Rational = Ratio<u64>;

/// Relative singular-value cutoff separating range from kernel.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

const PROJECTION_TOL: f64 = 1e-10;

/// An orthogonal projection together with its exact rank.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoProjection {
    matrix: CMatrix,
    rank: usize,
}

impl OrthoProjection {
    pub fn zero(n: usize) -> Self {
        OrthoProjection {
            matrix: CMatrix::zeros(n),
            rank: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        OrthoProjection {
            matrix: CMatrix::identity(n),
            rank: n,
        }
    }

    /// `V·V*` for an orthonormal n×k frame `V`.
    pub fn from_frame(frame: &Mat) -> Self {
        debug_assert!(frame_defect(frame) < 1e-9, "frame is not orthonormal");
        let matrix = CMatrix::try_from(frame.matmul_adjoint(frame))
            .expect("orthonormal frame has finite entries");
        OrthoProjection {
            matrix,
            rank: frame.cols(),
        }
    }

    /// Wraps a caller-supplied matrix after checking idempotency,
    /// self-adjointness and the trace against `rank`.
    pub fn from_matrix(matrix: CMatrix, rank: usize) -> Result<Self> {
        let p = OrthoProjection { matrix, rank };
        let (idem, adj, tr) = p.defects();
        if idem > PROJECTION_TOL || adj > PROJECTION_TOL || tr > PROJECTION_TOL {
            return Err(Error::NotProjection(format!(
                "idempotency {idem:e}, self-adjointness {adj:e}, trace {tr:e}"
            )));
        }
        if rank > p.dim() {
            return Err(Error::NotProjection(format!(
                "rank {rank} exceeds dimension"
            )));
        }
        Ok(p)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `τ(P) = rank/n` as an exact rational.
    pub fn trace_value(&self) -> Rational {
        Ratio::new(self.rank as u64, self.dim() as u64)
    }

    pub fn complement(&self) -> OrthoProjection {
        OrthoProjection {
            matrix: &CMatrix::identity(self.dim()) - &self.matrix,
            rank: self.dim() - self.rank,
        }
    }

    /// `(‖P²−P‖_F, ‖P*−P‖_F, |τ(P) − rank/n|)`.
    pub fn defects(&self) -> (f64, f64, f64) {
        let p = &self.matrix;
        let idem = (&(p * p) - p).frobenius_norm();
        let adj = (&p.adjoint() - p).frobenius_norm();
        let tr = (normalized_trace(p).re - self.rank as f64 / self.dim() as f64).abs()
            + normalized_trace(p).im.abs();
        (idem, adj, tr)
    }

    /// Frobenius distance between the two projection matrices.
    pub fn distance(&self, other: &OrthoProjection) -> f64 {
        (&self.matrix - &other.matrix).frobenius_norm()
    }
}

/// Projection onto the span of the left singular vectors with
/// `σᵢ > rank_tol·σ₁`; the zero matrix gives the zero projection.
pub fn range_projection(t: &CMatrix, rank_tol: f64) -> Result<OrthoProjection> {
    check_tol(rank_tol)?;
    let s = svd(t)?;
    let r = s.numerical_rank(rank_tol);
    Ok(OrthoProjection::from_frame(
        &s.left.as_mat().column_block(0, r),
    ))
}

/// Projection onto the span of the right singular vectors with
/// `σᵢ ≤ rank_tol·σ₁`. Its rank is always `n` minus the range rank.
pub fn kernel_projection(t: &CMatrix, rank_tol: f64) -> Result<OrthoProjection> {
    check_tol(rank_tol)?;
    let s = svd(t)?;
    let r = s.numerical_rank(rank_tol);
    Ok(OrthoProjection::from_frame(
        &s.right.as_mat().column_block(r, t.dim()),
    ))
}

fn check_tol(rank_tol: f64) -> Result<()> {
    if rank_tol > 0.0 && rank_tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "rank_tol must be positive and finite, got {rank_tol}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::mat::C64;

    fn e1(n: usize) -> CMatrix {
        CMatrix::from_fn(n, |i, j| {
            if i == 0 && j == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn range_and_kernel_of_diag_1_0() {
        let d = CMatrix::real_diagonal(&[1.0, 0.0]);
        let r = range_projection(&d, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank(), 1);
        assert!((r.matrix() - &d).frobenius_norm() < 1e-15);
        let k = kernel_projection(&d, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(k.rank(), 1);
        assert!((k.matrix() - &CMatrix::real_diagonal(&[0.0, 1.0])).frobenius_norm() < 1e-15);
    }

    #[test]
    fn invertible_has_full_range() {
        let t = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 3.0]]).unwrap();
        let r = range_projection(&t, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank(), 2);
        assert!((r.matrix() - &CMatrix::identity(2)).frobenius_norm() < 1e-14);
        let k = kernel_projection(&t, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(k.rank(), 0);
        assert_eq!(k.trace_value(), Rational::new(0, 1));
    }

    #[test]
    fn jordan_range_and_kernel_are_first_coordinate() {
        let j = CMatrix::jordan(2);
        let r = range_projection(&j, DEFAULT_RANK_TOL).unwrap();
        let k = kernel_projection(&j, DEFAULT_RANK_TOL).unwrap();
        assert_eq!((r.rank(), k.rank()), (1, 1));
        assert!((r.matrix() - &e1(2)).frobenius_norm() < 1e-15);
        assert!((k.matrix() - &e1(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn zero_matrix_range_is_zero() {
        let r = range_projection(&CMatrix::zeros(3), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank(), 0);
        assert_eq!(
            kernel_projection(&CMatrix::zeros(3), 1e-9).unwrap().rank(),
            3
        );
    }

    #[test]
    fn rejects_bad_tolerance_and_non_projection() {
        assert!(range_projection(&CMatrix::identity(2), 0.0).is_err());
        assert!(kernel_projection(&CMatrix::identity(2), f64::NAN).is_err());
        assert!(OrthoProjection::from_matrix(CMatrix::jordan(2), 1).is_err());
        assert!(OrthoProjection::from_matrix(e1(3), 1).is_ok());
        assert!(OrthoProjection::from_matrix(e1(3), 2).is_err());
    }
}
