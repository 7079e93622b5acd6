//! Nested chains of invariant projections with prescribed traces.
//!
//! A flag `0 = P₀ ≤ P₁ ≤ … ≤ P_m = I` is invariant for `T` when
//! `T·Pⱼ = Pⱼ·T·Pⱼ` for every `j`. At dimension `n` a target trace `t` is
//! realized by rank `⌊t·n⌋`, so the achieved trace is within `1/n` of `t`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::{
    normalized_trace, schur, trace_norm2, CMatrix, Mat, OrthoProjection, Rational,
};

/// Largest invariance defect a certified flag may carry.
pub const FLAG_RESIDUAL_TOL: f64 = 1e-9;
/// Largest `‖Pⱼ·Pⱼ₊₁ − Pⱼ‖_F` accepted as nesting.
pub const NESTING_TOL: f64 = 1e-9;
const PROJECTION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Flag {
    projections: Vec<OrthoProjection>,
    trace_targets: Vec<Rational>,
}

impl Flag {
    /// Assembles a flag without checking it; see [`validate_flag`].
    pub fn from_parts(projections: Vec<OrthoProjection>, trace_targets: Vec<Rational>) -> Self {
        Flag {
            projections,
            trace_targets,
        }
    }

    /// `Pⱼ` spanned by the first `⌊tⱼ·n⌋` columns of the unitary `basis`.
    pub fn from_basis(basis: &Mat, trace_targets: &[Rational]) -> Result<Self> {
        check_targets(trace_targets)?;
        let n = basis.rows();
        let projections = trace_targets
            .iter()
            .map(|&t| OrthoProjection::from_frame(&basis.column_block(0, quantized_rank(t, n))))
            .collect();
        Ok(Flag {
            projections,
            trace_targets: trace_targets.to_vec(),
        })
    }

    pub fn projections(&self) -> &[OrthoProjection] {
        &self.projections
    }

    pub fn trace_targets(&self) -> &[Rational] {
        &self.trace_targets
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projections.first().map_or(0, |p| p.dim())
    }
}

#[derive(Clone, Debug)]
pub struct FlagReport {
    pub flag: Flag,
    /// `‖T·Pⱼ − Pⱼ·T·Pⱼ‖₂` for each projection.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

impl FlagReport {
    pub fn certifies(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}

/// `⌊t·n⌋` for a rational `t ∈ [0, 1]`.
pub fn quantized_rank(t: Rational, n: usize) -> usize {
    ((*t.numer() as u128 * n as u128) / *t.denom() as u128) as usize
}

/// `(j / 2^levels)` for `j = 0..=2^levels`.
pub fn dyadic_targets(levels: u32) -> Vec<Rational> {
    let denom = 1u64 << levels;
    (0..=denom).map(|j| Rational::new(j, denom)).collect()
}

/// Targets must be non-decreasing in `[0, 1]`, start at 0 and end at 1.
pub fn check_targets(targets: &[Rational]) -> Result<()> {
    let bad = |msg: &str| {
        Err(Error::InvalidArgument(alloc::format!(
            "trace targets: {msg}"
        )))
    };
    let zero = Rational::new(0, 1);
    let one = Rational::new(1, 1);
    match (targets.first(), targets.last()) {
        (Some(&first), Some(&last)) if first == zero && last == one => {}
        _ => return bad("must start at 0 and end at 1"),
    }
    if targets.windows(2).any(|w| w[0] > w[1]) {
        return bad("must be sorted ascending");
    }
    if targets.iter().any(|&t| t > one) {
        return bad("must lie in [0, 1]");
    }
    Ok(())
}

/// Flag from the leading Schur vectors of `T`: each span of the first `k`
/// Schur vectors is invariant, so the residuals vanish up to rounding.
pub fn schur_flag(t: &CMatrix, trace_targets: &[Rational]) -> Result<FlagReport> {
    check_targets(trace_targets)?;
    let s = schur(t)?;
    let flag = Flag::from_basis(s.q.as_mat(), trace_targets)?;
    validate_flag(t, &flag)
}

/// Recomputes every structural invariant and every residual of `flag`
/// against `T` from scratch.
pub fn validate_flag(t: &CMatrix, flag: &Flag) -> Result<FlagReport> {
    let n = t.dim();
    let fail = |index: usize, kind: &'static str, magnitude: f64| {
        Err(Error::FlagValidation {
            index,
            kind,
            magnitude,
        })
    };
    if flag.projections.len() != flag.trace_targets.len() {
        return fail(
            flag.projections.len().min(flag.trace_targets.len()),
            "length",
            flag.trace_targets.len() as f64,
        );
    }
    check_targets(&flag.trace_targets)?;
    for (j, (p, &target)) in flag.projections.iter().zip(&flag.trace_targets).enumerate() {
        if p.dim() != n {
            return fail(j, "dimension", p.dim() as f64);
        }
        let (idem, adj, tr) = p.defects();
        if idem > PROJECTION_TOL {
            return fail(j, "idempotency", idem);
        }
        if adj > PROJECTION_TOL {
            return fail(j, "self-adjointness", adj);
        }
        if tr > PROJECTION_TOL {
            return fail(j, "trace", tr);
        }
        let want = quantized_rank(target, n);
        if p.rank() != want {
            return fail(j, "quantized trace", p.rank() as f64 - want as f64);
        }
    }
    let last = flag.projections.len() - 1;
    let first_norm = flag.projections[0].matrix().frobenius_norm();
    if first_norm > PROJECTION_TOL {
        return fail(0, "endpoint", first_norm);
    }
    let last_defect = (flag.projections[last].matrix() - &CMatrix::identity(n)).frobenius_norm();
    if last_defect > PROJECTION_TOL {
        return fail(last, "endpoint", last_defect);
    }
    for (j, w) in flag.projections.windows(2).enumerate() {
        let (a, b) = (w[0].matrix(), w[1].matrix());
        let nest = (&(a * b) - a).frobenius_norm();
        if nest > NESTING_TOL {
            return fail(j, "nesting", nest);
        }
    }

    let residuals: Vec<f64> = flag
        .projections
        .iter()
        .map(|p| invariance_defect(t, p))
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(FlagReport {
        flag: flag.clone(),
        residuals,
        max_residual,
    })
}

/// `‖T·P − P·T·P‖₂`.
pub fn invariance_defect(t: &CMatrix, p: &OrthoProjection) -> f64 {
    let tp = t * p.matrix();
    let ptp = p.matrix() * &tp;
    trace_norm2(&(&tp - &ptp))
}

/// Achieved normalized trace of each projection, as a float (diagnostic).
pub fn achieved_traces(flag: &Flag) -> Vec<f64> {
    flag.projections
        .iter()
        .map(|p| normalized_trace(p.matrix()).re)
        .collect()
}
