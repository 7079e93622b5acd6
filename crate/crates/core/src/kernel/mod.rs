//! Dense complex linear algebra over the finite tracial algebra `M_n(C)`.
//!
//! Everything here is a pure function of its inputs. The normalized trace
//! `τ = tr/n` and the norm `‖T‖₂ = τ(T*T)^{1/2}` are the ambient
//! functionals for every other module.

pub mod frame;
pub mod mat;
pub mod norms;
pub mod projection;
pub mod schur;
pub mod solve;
pub mod svd;

pub use frame::{frame_defect, orthonormal_completion, orthonormalize, qr_frame};
pub use mat::{CMatrix, Mat, C64, ONE, ZERO};
pub use norms::{normalized_trace, operator_norm, trace_norm2};
pub use projection::{
    kernel_projection, range_projection, OrthoProjection, Rational, DEFAULT_RANK_TOL,
};
pub use schur::{schur, SchurDecomposition};
pub use solve::inverse;
pub use svd::{svd, SingularDecomposition};
