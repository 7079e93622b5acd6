//! Trace-norm compression onto operators carrying a full dyadic invariant
//! flag.
//!
//! Each stage refines the block partition of the previous one: every
//! diagonal block is split in two, a supplier proposes an approximately
//! invariant subspace for the leading half, the small sub-diagonal corner is
//! spectrally truncated and zeroed, and the result is rescaled into the unit
//! ball. Stage `k` is allowed a trace-norm perturbation of `ε/2^(k+1)`.
//!
//! The working operator is tracked twice: globally, and in the coordinates
//! of an accumulated unitary basis `W` in which it is exactly block upper
//! triangular. Global updates are applied as `S ← S + W·ΔM·W*`, so a stage
//! that changes nothing leaves `S` bit-for-bit unchanged.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flags::{
    dyadic_targets, quantized_rank, schur_flag, validate_flag, Flag, FlagReport, FLAG_RESIDUAL_TOL,
};
use crate::kernel::{
    frame_defect, operator_norm, orthonormal_completion, schur, svd, trace_norm2, CMatrix, Mat,
    OrthoProjection, ONE, ZERO,
};

/// Slack allowed on `‖T‖ ≤ 1` for inputs and outputs.
pub const NORM_SLACK: f64 = 1e-12;
const FRAME_TOL: f64 = 1e-10;

/// Per-stage budgets and the `(δ, ε₁)` pair chosen for each.
///
/// Stage `k` splits `2^k` blocks. With every block defect below `δ`, the
/// discarded columns cost at most `m·δ/ε₁` and the zeroed corners `m·δ`,
/// where `m = √(2^k)`, and rescaling costs at most `ε₁`. The schedule takes
/// `ε₁ = b/4` and `δ = b·ε₁/(2m(1+ε₁))`, so the three terms sum to `3b/4`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSchedule {
    pub eps: f64,
    pub stage_budgets: Vec<f64>,
    pub delta: Vec<f64>,
    pub eps1: Vec<f64>,
}

impl ParameterSchedule {
    /// Budgets `ε/2^(k+1)` for `k < levels`.
    pub fn dyadic(eps: f64, levels: u32) -> Result<Self> {
        check_eps(eps)?;
        if levels == 0 {
            return Err(Error::InvalidArgument("levels must be at least 1".into()));
        }
        let budgets = (0..levels)
            .map(|k| eps / (1u64 << (k + 1)) as f64)
            .collect();
        Ok(Self::from_budgets(eps, budgets))
    }

    /// One single-block stage spending the whole of `eps`.
    pub fn single(eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self::from_budgets(eps, alloc::vec![eps]))
    }

    fn from_budgets(eps: f64, stage_budgets: Vec<f64>) -> Self {
        let eps1: Vec<f64> = stage_budgets.iter().map(|b| b / 4.0).collect();
        let delta = stage_budgets
            .iter()
            .zip(&eps1)
            .enumerate()
            .map(|(k, (b, e1))| b * e1 / (2.0 * block_factor(k) * (1.0 + e1)))
            .collect();
        ParameterSchedule {
            eps,
            stage_budgets,
            delta,
            eps1,
        }
    }

    /// `ε₁ + m·δ/ε₁ + m·δ < b` at every stage and `Σ b < ε`.
    pub fn is_admissible(&self) -> bool {
        let per_stage = self
            .stage_budgets
            .iter()
            .zip(&self.delta)
            .zip(&self.eps1)
            .enumerate()
            .all(|(k, ((&b, &d), &e1))| {
                let m = block_factor(k);
                d > 0.0 && e1 > 0.0 && e1 + m * d / e1 + m * d < b
            });
        per_stage && self.stage_budgets.iter().sum::<f64>() < self.eps
    }

    pub fn stages(&self) -> usize {
        self.stage_budgets.len()
    }
}

/// `√(2^k)`: stage `k` has `2^k` blocks, whose defects add in quadrature.
pub fn block_factor(stage: usize) -> f64 {
    libm::sqrt((1u64 << stage) as f64)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "eps must be positive and finite, got {eps}"
        )))
    }
}

/// Proposes, for a diagonal block `B` (m×m, coordinates local to the
/// block), an orthonormal m×h frame spanning an approximately
/// `B`-invariant subspace.
pub trait HalfSupplier {
    fn frame(&self, block: &CMatrix, rank: usize) -> Result<Mat>;

    fn name(&self) -> String {
        String::from("custom")
    }
}

/// Leading Schur vectors: exact invariance up to rounding.
#[derive(Clone, Copy, Debug, Default)]
pub struct SchurSupplier;

impl HalfSupplier for SchurSupplier {
    fn frame(&self, block: &CMatrix, rank: usize) -> Result<Mat> {
        Ok(schur(block)?.q.as_mat().column_block(0, rank))
    }

    fn name(&self) -> String {
        String::from("schur")
    }
}

/// Always returns the leading coordinate frame of the block.
#[derive(Clone, Copy, Debug, Default)]
pub struct CoordinateSupplier;

impl HalfSupplier for CoordinateSupplier {
    fn frame(&self, block: &CMatrix, rank: usize) -> Result<Mat> {
        Ok(Mat::coordinate_frame(block.dim(), rank))
    }

    fn name(&self) -> String {
        String::from("coordinate")
    }
}

/// Caller-provided strategy.
pub struct FnSupplier<F>(pub F);

impl<F> HalfSupplier for FnSupplier<F>
where
    F: Fn(&CMatrix, usize) -> Result<Mat>,
{
    fn frame(&self, block: &CMatrix, rank: usize) -> Result<Mat> {
        (self.0)(block, rank)
    }
}

impl<S: HalfSupplier + ?Sized> HalfSupplier for Box<S> {
    fn frame(&self, block: &CMatrix, rank: usize) -> Result<Mat> {
        (**self).frame(block, rank)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

/// One stage of the pipeline.
#[derive(Clone, Debug)]
pub struct CompressionStep {
    pub stage: usize,
    pub budget: f64,
    pub delta: f64,
    pub eps1: f64,
    pub input: CMatrix,
    pub output: CMatrix,
    /// `Q = I − Σᵢ (P₁ᵢ − P₁ᵢ′)`: the columns kept after truncation.
    pub corner_projection: OrthoProjection,
    /// For each split block `i`, the projection onto every block before it
    /// plus its leading half; each is invariant for `output`.
    pub half_projections: Vec<OrthoProjection>,
    /// Supplier defect `‖P₂ᵢ·T·P₁ᵢ‖₂` per block.
    pub block_defects: Vec<f64>,
    /// `rank(P₁ᵢ − P₁ᵢ′)` per block.
    pub truncated_ranks: Vec<usize>,
    pub perturbation: f64,
    pub rescale_factor: f64,
}

#[derive(Clone, Debug)]
pub struct CompressionReport {
    pub source: CMatrix,
    pub result: CMatrix,
    pub flag_report: FlagReport,
    pub steps: Vec<CompressionStep>,
    pub total_perturbation: f64,
    pub schedule: ParameterSchedule,
    pub supplier: String,
}

/// Spectral projection of `|T|` onto singular values `≤ eps`.
///
/// `‖T·P‖ ≤ eps`, `P` contains the kernel of `T`, and every discarded
/// direction carries at least `eps²/n` of `‖T‖₂²`, which bounds `τ(I−P)`.
pub fn spectral_truncate(t: &CMatrix, eps: f64) -> Result<OrthoProjection> {
    check_eps(eps)?;
    let s = svd(t)?;
    let above = s.singular_values.iter().take_while(|&&x| x > eps).count();
    Ok(OrthoProjection::from_frame(
        &s.right.as_mat().column_block(above, t.dim()),
    ))
}

struct State {
    global: CMatrix,
    /// Same operator in the basis `basis`, exactly block upper triangular.
    local: Mat,
    basis: Mat,
}

/// Runs one stage over the half-open blocks `bounds[i]..bounds[i+1]`,
/// splitting block `i` at `splits[i]`.
fn run_stage(
    state: &mut State,
    stage: usize,
    bounds: &[usize],
    splits: &[usize],
    schedule: &ParameterSchedule,
    supplier: &dyn HalfSupplier,
) -> Result<CompressionStep> {
    let n = state.global.dim();
    let budget = schedule.stage_budgets[stage];
    let delta = schedule.delta[stage];
    let eps1 = schedule.eps1[stage];

    // rotate each block by a unitary whose leading columns are the supplier frame
    let mut rotation = Mat::zeros(n, n);
    for (i, w) in bounds.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let h = splits[i] - a;
        let block = CMatrix::try_from(state.local.submatrix(a, b, a, b))?;
        let frame = supplier.frame(&block, h)?;
        if frame.rows() != b - a || frame.cols() != h {
            return Err(Error::InvalidArgument(format!(
                "supplier returned a {}x{} frame, expected {}x{h}",
                frame.rows(),
                frame.cols(),
                b - a
            )));
        }
        let fd = frame_defect(&frame);
        if !(fd <= FRAME_TOL) {
            return Err(Error::InvalidArgument(format!(
                "supplier frame is not orthonormal (defect {fd:e})"
            )));
        }
        let u = orthonormal_completion(&frame);
        for r in 0..b - a {
            for c in 0..b - a {
                rotation[(a + r, a + c)] = u[(r, c)];
            }
        }
    }
    let before = rotation.adjoint_matmul(&state.local.matmul(&rotation));
    let basis = state.basis.matmul(&rotation);

    // measure each corner, truncate, and build the block-diagonal Q
    let sqrt_n = libm::sqrt(n as f64);
    let mut zeroed = before.clone();
    let mut q = Mat::zeros(n, n);
    let mut block_defects = Vec::with_capacity(splits.len());
    let mut truncated_ranks = Vec::with_capacity(splits.len());
    for (i, w) in bounds.windows(2).enumerate() {
        let (a, b, s) = (w[0], w[1], splits[i]);
        let corner = before.submatrix(s, b, a, s);
        let defect = corner.frobenius_norm() / sqrt_n;
        if !(defect < delta) {
            return Err(Error::SupplierDefect {
                stage,
                block: i,
                defect,
                delta,
            });
        }
        block_defects.push(defect);
        let m = b - a;
        let h = s - a;
        let embedded = CMatrix::try_from(Mat::from_fn(m, m, |r, c| {
            if r >= h && c < h {
                corner[(r - h, c)]
            } else {
                ZERO
            }
        }))?;
        let keep = spectral_truncate(&embedded, eps1)?;
        truncated_ranks.push(m - keep.rank());
        for r in 0..m {
            for c in 0..m {
                q[(a + r, a + c)] = if r < h && c < h {
                    keep.matrix()[(r, c)]
                } else if r == c {
                    ONE
                } else {
                    ZERO
                };
            }
            if r >= h {
                for c in 0..h {
                    zeroed[(a + r, a + c)] = ZERO;
                }
            }
        }
    }

    let mut r_local = zeroed.matmul(&q);
    enforce_block_triangular(&mut r_local, bounds, splits);
    let r_norm = operator_norm(&CMatrix::try_from(r_local.clone())?);
    let rescale_factor = 1.0 / r_norm.max(1.0);
    let after = if rescale_factor == 1.0 {
        r_local
    } else {
        r_local.scale_real(rescale_factor)
    };

    let change = &after - &before;
    let global = if change.max_abs() == 0.0 {
        state.global.clone()
    } else {
        let delta_global = basis.matmul(&change).matmul_adjoint(&basis);
        CMatrix::try_from(state.global.as_mat() + &delta_global)?
    };
    let perturbation = trace_norm2(&(&global - &state.global));
    if !(perturbation < budget) {
        return Err(Error::StageBudget {
            stage,
            perturbation,
            budget,
        });
    }

    let corner_projection = OrthoProjection::from_matrix(
        CMatrix::try_from(basis.matmul(&q).matmul_adjoint(&basis))?,
        libm::round((0..n).map(|j| q[(j, j)].re).sum::<f64>()) as usize,
    )?;
    let half_projections = splits
        .iter()
        .map(|&s| OrthoProjection::from_frame(&basis.column_block(0, s)))
        .collect();

    let step = CompressionStep {
        stage,
        budget,
        delta,
        eps1,
        input: state.global.clone(),
        output: global.clone(),
        corner_projection,
        half_projections,
        block_defects,
        truncated_ranks,
        perturbation,
        rescale_factor,
    };
    *state = State {
        global,
        local: after,
        basis,
    };
    Ok(step)
}

/// Clears every entry below the diagonal blocks of the refined partition.
/// In exact arithmetic these are already zero.
fn enforce_block_triangular(m: &mut Mat, bounds: &[usize], splits: &[usize]) {
    let mut cuts: Vec<usize> = bounds.iter().chain(splits).copied().collect();
    cuts.sort_unstable();
    cuts.dedup();
    for w in cuts.windows(2) {
        for c in w[0]..w[1] {
            for r in w[1]..m.rows() {
                m[(r, c)] = ZERO;
            }
        }
    }
}

fn check_input(t: &CMatrix) -> Result<()> {
    let norm = operator_norm(t);
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::InvalidArgument(format!(
            "operator norm {norm} exceeds 1"
        )));
    }
    Ok(())
}

fn initial_state(t: &CMatrix) -> State {
    State {
        global: t.clone(),
        local: t.as_mat().clone(),
        basis: Mat::identity(t.dim()),
    }
}

/// A single splitting stage at rank `⌊n/2⌋` with budget `eps`.
pub fn half_step(t: &CMatrix, eps: f64, supplier: &dyn HalfSupplier) -> Result<CompressionStep> {
    let schedule = ParameterSchedule::single(eps)?;
    check_input(t)?;
    let n = t.dim();
    if n < 2 {
        return Err(Error::InvalidArgument("half_step needs n >= 2".into()));
    }
    let mut state = initial_state(t);
    run_stage(&mut state, 0, &[0, n], &[n / 2], &schedule, supplier)
}

/// Block boundaries after `stage` splits: `⌊j·n/2^stage⌋`.
pub fn stage_bounds(n: usize, stage: u32) -> Vec<usize> {
    let parts = 1usize << stage;
    (0..=parts).map(|j| j * n / parts).collect()
}

/// Full pipeline: `levels` stages, then the final dyadic flag is assembled
/// and validated against the result.
pub fn dyadic_compress(
    t: &CMatrix,
    eps: f64,
    levels: u32,
    supplier: &dyn HalfSupplier,
) -> Result<CompressionReport> {
    let schedule = ParameterSchedule::dyadic(eps, levels)?;
    debug_assert!(schedule.is_admissible());
    check_input(t)?;
    let n = t.dim();
    if levels >= usize::BITS || (1usize << levels) > n {
        return Err(Error::InvalidArgument(format!(
            "2^{levels} exceeds dimension {n}"
        )));
    }

    let mut state = initial_state(t);
    let mut steps = Vec::with_capacity(levels as usize);
    for k in 0..levels {
        let bounds = stage_bounds(n, k);
        let finer = stage_bounds(n, k + 1);
        let splits: Vec<usize> = finer.iter().skip(1).step_by(2).copied().collect();
        steps.push(run_stage(
            &mut state, k as usize, &bounds, &splits, &schedule, supplier,
        )?);
    }

    let flag = assemble_flag(&state.basis, levels)?;
    let result = state.global;
    let flag_report = validate_flag(&result, &flag)?;
    if let Some((index, &worst)) = flag_report
        .residuals
        .iter()
        .enumerate()
        .find(|(_, &r)| r > FLAG_RESIDUAL_TOL)
    {
        return Err(Error::FlagValidation {
            index,
            kind: "invariance",
            magnitude: worst,
        });
    }
    let total_perturbation = trace_norm2(&(&result - t));
    if !(total_perturbation < eps) {
        return Err(Error::StageBudget {
            stage: steps.len(),
            perturbation: total_perturbation,
            budget: eps,
        });
    }
    Ok(CompressionReport {
        source: t.clone(),
        result,
        flag_report,
        steps,
        total_perturbation,
        schedule,
        supplier: supplier.name(),
    })
}

/// `P_t` is the join, over coarser stages `m ≤ levels`, of the sums of the
/// first `⌊t·2^m⌋` stage-`m` blocks. The partitions refine each other, so
/// the join is the span of the leading `max_m ⌊⌊t·2^m⌋·n/2^m⌋` columns.
fn assemble_flag(basis: &Mat, levels: u32) -> Result<Flag> {
    let n = basis.rows();
    let targets = dyadic_targets(levels);
    let projections = targets
        .iter()
        .map(|&t| {
            let cols = (0..=levels)
                .map(|m| {
                    let k = quantized_rank(t, 1usize << m);
                    k * n / (1usize << m)
                })
                .max()
                .unwrap_or(0);
            debug_assert_eq!(cols, quantized_rank(t, n));
            OrthoProjection::from_frame(&basis.column_block(0, cols))
        })
        .collect();
    Ok(Flag::from_parts(projections, targets))
}

/// Certificate that `S` carries an invariant dyadic flag.
#[derive(Clone, Debug)]
pub struct Membership {
    pub report: FlagReport,
    pub certified: bool,
}

/// Schur flag of `S` at dyadic targets. Every finite matrix triangularizes,
/// so this certifies any `S`; membership carries information only with a
/// flag fixed in advance, which [`validate_flag`] checks.
pub fn membership_check(s: &CMatrix, levels: u32) -> Result<Membership> {
    if levels == 0 {
        return Err(Error::InvalidArgument("levels must be at least 1".into()));
    }
    let report = schur_flag(s, &dyadic_targets(levels))?;
    let certified = report.max_residual <= FLAG_RESIDUAL_TOL;
    Ok(Membership { report, certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{C64, ONE};
    use crate::random::SeededStream;

    fn unit_ginibre(seed: u64, n: usize) -> CMatrix {
        let g = SeededStream::new(seed, 0).ginibre(n);
        g.scale(1.0 / operator_norm(&g))
    }

    #[test]
    fn truncate_diagonal_example() {
        let p = spectral_truncate(&CMatrix::real_diagonal(&[0.1, 0.5]), 0.2).unwrap();
        assert!((p.matrix() - &CMatrix::real_diagonal(&[1.0, 0.0])).frobenius_norm() < 1e-15);
        assert_eq!(p.rank(), 1);
        let z = spectral_truncate(&CMatrix::zeros(3), 0.7).unwrap();
        assert_eq!(z.rank(), 3);
    }

    #[test]
    fn schedule_is_admissible() {
        for eps in [1e-3, 0.05, 0.1, 1.0, 3.0] {
            for levels in 1..6 {
                let s = ParameterSchedule::dyadic(eps, levels).unwrap();
                assert!(s.is_admissible(), "eps {eps} levels {levels}");
                // slack of a quarter budget per stage
                for k in 0..s.stages() {
                    let (b, d, e, m) = (s.stage_budgets[k], s.delta[k], s.eps1[k], block_factor(k));
                    assert!((e + m * d / e + m * d - 0.75 * b).abs() < 1e-12 * b);
                }
            }
        }
        assert!(ParameterSchedule::dyadic(0.0, 2).is_err());
        assert!(ParameterSchedule::dyadic(0.1, 0).is_err());
    }

    #[test]
    fn upper_triangular_half_step_is_identity_map() {
        let t = CMatrix::from_fn(4, |i, j| {
            if j >= i {
                C64::new(0.1 * (1 + i + j) as f64, 0.05)
            } else {
                ZERO
            }
        });
        let t = t.scale(0.9 / operator_norm(&t));
        let step = half_step(&t, 0.01, &SchurSupplier).unwrap();
        assert_eq!(step.output, t);
        assert_eq!(step.perturbation, 0.0);
        assert_eq!(step.rescale_factor, 1.0);
        assert_eq!(step.truncated_ranks, alloc::vec![0]);
    }

    #[test]
    fn two_by_two_corner_is_removed() {
        let eta = 0.01;
        let t = CMatrix::from_fn(2, |i, j| {
            if (i, j) == (1, 0) {
                C64::new(eta, 0.0)
            } else {
                ZERO
            }
        });
        let step = half_step(&t, 0.5, &CoordinateSupplier).unwrap();
        assert_eq!(step.output[(1, 0)], ZERO);
        assert!((step.block_defects[0] - eta / 2f64.sqrt()).abs() < 1e-15);
        // ε₁ > η: nothing is truncated, only the corner is removed
        assert_eq!(step.truncated_ranks, alloc::vec![0]);
        assert!((step.perturbation - eta / 2f64.sqrt()).abs() < 1e-15);
        assert!(step.perturbation < 0.5);
    }

    #[test]
    fn large_corner_singular_value_is_truncated() {
        // a rank-one corner with σ = 0.3 above ε₁ = 0.25 but a small trace norm
        let n = 16;
        let t = CMatrix::from_fn(n, |i, j| {
            if j >= i {
                C64::new(0.02, 0.0)
            } else if i == n - 1 && j == 0 {
                C64::new(0.3, 0.0)
            } else {
                ZERO
            }
        });
        let t = t.scale(1.0 / operator_norm(&t).max(1.0));
        let step = half_step(&t, 1.0, &CoordinateSupplier).unwrap();
        assert_eq!(step.truncated_ranks, alloc::vec![1]);
        assert_eq!(step.corner_projection.rank(), n - 1);
        assert!(step.perturbation < 1.0);
        assert!(operator_norm(&step.output) <= 1.0 + NORM_SLACK);
    }

    #[test]
    fn supplier_defect_is_reported() {
        let t = CMatrix::from_fn(2, |i, j| if (i, j) == (1, 0) { ONE } else { ZERO });
        let expected_delta = 0.1 * 0.025 / (2.0 * 1.025);
        match half_step(&t, 0.1, &CoordinateSupplier) {
            Err(Error::SupplierDefect {
                stage: 0,
                block: 0,
                defect,
                delta,
            }) => {
                assert!((defect - 0.5f64.sqrt()).abs() < 1e-15);
                assert!((delta - expected_delta).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_supplier_frame_is_refused() {
        let t = unit_ginibre(1, 4);
        let wrong_shape =
            FnSupplier(|b: &CMatrix, _k: usize| Ok(Mat::coordinate_frame(b.dim(), 1)));
        assert!(matches!(
            half_step(&t, 0.1, &wrong_shape),
            Err(Error::InvalidArgument(_))
        ));
        let not_orthonormal = FnSupplier(|b: &CMatrix, k: usize| {
            Ok(Mat::coordinate_frame(b.dim(), k).scale_real(2.0))
        });
        assert!(matches!(
            half_step(&t, 0.1, &not_orthonormal),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn ginibre_half_step_contract() {
        let t = unit_ginibre(16, 16);
        let step = half_step(&t, 0.1, &SchurSupplier).unwrap();
        assert!(step.perturbation < 0.1);
        assert!(operator_norm(&step.output) <= 1.0 + NORM_SLACK);
        let p = &step.half_projections[0];
        assert_eq!(p.rank(), 8);
        let s = &step.output;
        let corner = &(s * p.matrix()) - &(&(p.matrix() * s) * p.matrix());
        assert!(trace_norm2(&corner) <= 1e-10);
    }

    #[test]
    fn triangular_pipeline_is_exact() {
        let t = CMatrix::from_fn(8, |i, j| {
            if j >= i {
                C64::new(1.0 / (1 + i + j) as f64, 0.0)
            } else {
                ZERO
            }
        });
        let t = t.scale(1.0 / operator_norm(&t));
        let rep = dyadic_compress(&t, 0.01, 2, &CoordinateSupplier).unwrap();
        assert_eq!(rep.total_perturbation, 0.0);
        assert_eq!(rep.result, t);
        assert!(rep.flag_report.residuals.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn random_pipeline_contract() {
        let t = unit_ginibre(8, 8);
        let rep = dyadic_compress(&t, 0.05, 2, &SchurSupplier).unwrap();
        let ranks: Vec<usize> = rep
            .flag_report
            .flag
            .projections()
            .iter()
            .map(|p| p.rank())
            .collect();
        assert_eq!(ranks, alloc::vec![0, 2, 4, 6, 8]);
        assert!(rep.total_perturbation < 0.05);
        assert!(operator_norm(&rep.result) <= 1.0 + NORM_SLACK);
        assert!(rep.flag_report.max_residual <= 1e-9);
        let stage_sum: f64 = rep.steps.iter().map(|s| s.perturbation).sum();
        assert!(rep.total_perturbation <= stage_sum + 1e-10);
        assert_eq!(rep.supplier, "schur");
    }

    #[test]
    fn odd_dimension_and_deep_levels() {
        let t = unit_ginibre(3, 11);
        let rep = dyadic_compress(&t, 0.1, 3, &SchurSupplier).unwrap();
        let ranks: Vec<usize> = rep
            .flag_report
            .flag
            .projections()
            .iter()
            .map(|p| p.rank())
            .collect();
        assert_eq!(ranks, (0..=8).map(|j| j * 11 / 8).collect::<Vec<_>>());
        assert!(rep.flag_report.max_residual <= 1e-9);
    }

    #[test]
    fn pipeline_preconditions() {
        let t = unit_ginibre(2, 4);
        assert!(dyadic_compress(&t, 0.1, 3, &SchurSupplier).is_err());
        assert!(dyadic_compress(&t.scale(2.0), 0.1, 1, &SchurSupplier).is_err());
        assert!(dyadic_compress(&t, -1.0, 1, &SchurSupplier).is_err());
    }

    #[test]
    fn membership_of_identity_and_generic() {
        assert!(
            membership_check(&CMatrix::identity(4), 2)
                .unwrap()
                .certified
        );
        assert!(membership_check(&unit_ginibre(4, 8), 2).unwrap().certified);
        assert!(membership_check(&CMatrix::identity(4), 0).is_err());
    }
}
