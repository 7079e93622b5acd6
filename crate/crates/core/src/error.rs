use alloc::string::String;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schur iteration did not converge for matrix {hash} within {budget} QR steps")]
    SchurNoConvergence { hash: String, budget: usize },

    #[error("jacobi svd did not converge for matrix {hash} within {sweeps} sweeps")]
    SvdNoConvergence { hash: String, sweeps: usize },

    #[error("matrix is singular to working precision (pivot {pivot} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("not an orthogonal projection: {0}")]
    NotProjection(String),

    #[error("flag check failed at index {index}: {kind} defect {magnitude:e}")]
    FlagValidation {
        index: usize,
        kind: &'static str,
        magnitude: f64,
    },

    #[error(
        "supplier defect {defect:e} is not below delta {delta:e} (stage {stage}, block {block})"
    )]
    SupplierDefect {
        stage: usize,
        block: usize,
        defect: f64,
        delta: f64,
    },

    #[error("stage {stage} perturbation {perturbation:e} exceeds its budget {budget:e}")]
    StageBudget {
        stage: usize,
        perturbation: f64,
        budget: f64,
    },

    #[error("gradient check failed for {objective} objective at point {point}: analytic {analytic:e}, finite difference {numeric:e}")]
    GradientCheck {
        objective: &'static str,
        point: usize,
        analytic: f64,
        numeric: f64,
    },

    #[error("brute force search refused for n = {n} (limit 3)")]
    BruteForceTooLarge { n: usize },

    #[error("eigenvalues not distinct: minimum gap {gap:e} below threshold {threshold:e}")]
    RepeatedEigenvalues { gap: f64, threshold: f64 },

    #[error("lattice enumeration refused for n = {n} (limit {limit})")]
    LatticeTooLarge { n: usize, limit: usize },

    #[error("projection does not match any lattice element (closest distance {distance:e})")]
    NotInLattice { distance: f64 },

    #[error("intertwining residual {residual:e} exceeds {threshold:e}")]
    NotIntertwining { residual: f64, threshold: f64 },

    #[error("operator has a non-trivial kernel of rank {rank}")]
    NonTrivialKernel { rank: usize },

    #[error("lattice map contract violated: {0}")]
    LatticeContract(String),
}

pub type Result<T> = core::result::Result<T, Error>;
