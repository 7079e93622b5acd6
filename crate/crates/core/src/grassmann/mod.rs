//! Minimizing projection-valued defects over rank-`k` projections.
//!
//! Projections are parametrized by orthonormal frames, `P = V·V*`. The
//! descent minimizes `f(V) = ‖C‖_F²/n`, where `C` is the commutator
//! `PT − TP` or the invariance defect `TP − PTP`, and reports `√f`, the
//! normalized trace-norm defect.
//!
//! With `G = T·C* − C*·T` (commutator) or `G = C*·T − T·P·C* − C*·P·T`
//! (invariance), the Euclidean gradient is `(2/n)(G + G*)·V`; the
//! Riemannian gradient is its component orthogonal to the range of `V`.
//! Both are evaluated in `O(n²k)` without forming `G`.

mod brute;

pub use brute::brute_force_distance;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::compress::HalfSupplier;
use crate::error::{Error, Result};
use crate::kernel::{frame_defect, qr_frame, schur, trace_norm2, CMatrix, Mat, OrthoProjection};
use crate::random::SeededStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    /// `‖PT − TP‖₂`
    Commutator,
    /// `‖TP − PTP‖₂`
    Invariance,
}

impl ObjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Commutator => "commutator",
            ObjectiveKind::Invariance => "invariance",
        }
    }
}

impl core::str::FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "commutator" => Ok(ObjectiveKind::Commutator),
            "invariance" => Ok(ObjectiveKind::Invariance),
            other => Err(Error::InvalidArgument(format!(
                "unknown objective {other:?}"
            ))),
        }
    }
}

/// An orthonormal n×k frame.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryPoint {
    v: Mat,
}

impl IsometryPoint {
    pub fn new(v: Mat) -> Result<Self> {
        let defect = frame_defect(&v);
        if !(defect <= 1e-10) {
            return Err(Error::InvalidArgument(format!(
                "frame is not orthonormal (defect {defect:e})"
            )));
        }
        Ok(IsometryPoint { v })
    }

    pub fn frame(&self) -> &Mat {
        &self.v
    }

    pub fn k(&self) -> usize {
        self.v.cols()
    }

    pub fn n(&self) -> usize {
        self.v.rows()
    }

    pub fn projection(&self) -> OrthoProjection {
        OrthoProjection::from_frame(&self.v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Total starts, warm starts included.
    pub restarts: usize,
    pub max_iterations: usize,
    pub grad_tol: f64,
    pub armijo_factor: f64,
    pub armijo_slope: f64,
    pub seed: u64,
    /// Begin with the leading Schur vectors and the leading coordinate
    /// frame before drawing random frames.
    pub warm_starts: bool,
    pub gradient_check_points: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iterations: 500,
            grad_tol: 1e-9,
            armijo_factor: 0.5,
            armijo_slope: 1e-4,
            seed: 0,
            warm_starts: true,
            gradient_check_points: 10,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("optimizer config: {what}")));
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if self.max_iterations == 0 {
            return bad("iteration budget must be positive");
        }
        if !(self.grad_tol >= 0.0 && self.grad_tol.is_finite()) {
            return bad("grad_tol must be finite and non-negative");
        }
        if !(self.armijo_factor > 0.0 && self.armijo_factor < 1.0) {
            return bad("armijo_factor must lie in (0, 1)");
        }
        if !(self.armijo_slope > 0.0 && self.armijo_slope < 1.0) {
            return bad("armijo_slope must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartKind {
    Schur,
    Coordinate,
    /// Ginibre frame from stream `stream` of the configured seed.
    Random {
        stream: u64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartTrace {
    pub start: StartKind,
    pub initial_value: f64,
    pub final_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct DistanceResult {
    pub objective: ObjectiveKind,
    pub k: usize,
    /// Upper estimate of the minimum; equals the defect of `best_projection`.
    pub best_value: f64,
    pub best_projection: OrthoProjection,
    pub best_frame: IsometryPoint,
    pub restarts: usize,
    pub converged_restarts: usize,
    pub seed: u64,
    pub config: OptimizerConfig,
    pub trace: Vec<RestartTrace>,
}

/// `‖PT − TP‖₂` or `‖TP − PTP‖₂`.
pub fn objective_value(t: &CMatrix, p: &OrthoProjection, kind: ObjectiveKind) -> f64 {
    let p = p.matrix();
    let tp = t * p;
    let c = match kind {
        ObjectiveKind::Commutator => &(p * t) - &tp,
        ObjectiveKind::Invariance => &tp - &(p * &tp),
    };
    trace_norm2(&c)
}

/// `C` for the frame `V`, formed in `O(n²k)`.
fn defect_matrix(t: &Mat, v: &Mat, kind: ObjectiveKind) -> Mat {
    let tv = t.matmul(v);
    let tp = tv.matmul_adjoint(v);
    match kind {
        ObjectiveKind::Commutator => {
            let pt = v.matmul(&v.adjoint_matmul(t));
            &pt - &tp
        }
        ObjectiveKind::Invariance => {
            let ptp = v.matmul(&v.adjoint_matmul(&tp));
            &tp - &ptp
        }
    }
}

/// `(f, ∇f)` with `f = ‖C‖_F²/n` and the Euclidean gradient in `V`.
fn value_and_gradient(t: &Mat, v: &Mat, kind: ObjectiveKind) -> (f64, Mat) {
    let n = t.rows() as f64;
    let c = defect_matrix(t, v, kind);
    let value = c.frobenius_norm_sqr() / n;
    let ch = c.adjoint();
    // G·V and G*·V, each as a sum of products applied to V first
    let (gv, gsv) = match kind {
        ObjectiveKind::Commutator => {
            // G = T·C* − C*·T, G* = C·T* − T*·C
            let chv = ch.matmul(v);
            let cv = c.matmul(v);
            let tv = t.matmul(v);
            let thv = t.adjoint_matmul(v);
            let gv = &t.matmul(&chv) - &ch.matmul(&tv);
            let gsv = &c.matmul(&thv) - &t.adjoint_matmul(&cv);
            (gv, gsv)
        }
        ObjectiveKind::Invariance => {
            // G = C*·T − T·P·C* − C*·P·T
            // G* = T*·C − C·P·T* − T*·P·C
            let tv = t.matmul(v);
            let chv = ch.matmul(v);
            let thv = t.adjoint_matmul(v);
            let cv = c.matmul(v);
            let p = |x: &Mat| v.matmul(&v.adjoint_matmul(x));
            let gv = &(&ch.matmul(&tv) - &t.matmul(&p(&chv))) - &ch.matmul(&p(&tv));
            let gsv = &(&t.adjoint_matmul(&cv) - &c.matmul(&p(&thv))) - &t.adjoint_matmul(&p(&cv));
            (gv, gsv)
        }
    };
    let grad = (&gv + &gsv).scale_real(2.0 / n);
    (value, grad)
}

/// Component of `x` orthogonal to the range of `V`.
fn horizontal(v: &Mat, x: &Mat) -> Mat {
    x - &v.matmul(&v.adjoint_matmul(x))
}

/// Central differences along the QR retraction at `points` random frames,
/// in random horizontal directions, against the analytic derivative.
///
/// `eval` maps an `n×k` frame to the objective and its Euclidean gradient.
pub fn check_gradient<F>(
    n: usize,
    k: usize,
    points: usize,
    seed: u64,
    kind: ObjectiveKind,
    eval: F,
) -> Result<()>
where
    F: Fn(&Mat) -> (f64, Mat),
{
    const H: f64 = 1e-5;
    let mut rng = SeededStream::new(seed, GRADIENT_CHECK_STREAM);
    for point in 0..points {
        let v = rng.frame(n, k);
        let (f0, egrad) = eval(&v);
        let xi = horizontal(&v, &rng.gaussian_mat(n, k));
        let xi = xi.scale_real(1.0 / xi.frobenius_norm());
        let plus = eval(&qr_frame(&(&v + &xi.scale_real(H)))).0;
        let minus = eval(&qr_frame(&(&v - &xi.scale_real(H)))).0;
        let numeric = (plus - minus) / (2.0 * H);
        let analytic = egrad.real_inner(&xi);
        let scale = numeric.abs().max(analytic.abs());
        // rounding in f(V ± hξ) is amplified by 1/h in the difference
        let noise = 16.0 * n as f64 * f64::EPSILON * (1.0 + f0.abs()) / H;
        if !((numeric - analytic).abs() <= 1e-6 * scale + noise) {
            return Err(Error::GradientCheck {
                objective: kind.as_str(),
                point,
                analytic,
                numeric,
            });
        }
    }
    Ok(())
}

/// Stream id reserved for gradient-check points; restarts use `0..restarts`.
pub const GRADIENT_CHECK_STREAM: u64 = u64::MAX;

/// Verifies the analytic gradient of `kind` for `T` at `points` random frames.
pub fn gradient_check(
    t: &CMatrix,
    k: usize,
    kind: ObjectiveKind,
    points: usize,
    seed: u64,
) -> Result<()> {
    let tm = t.as_mat();
    check_gradient(t.dim(), k, points, seed, kind, |v| {
        value_and_gradient(tm, v, kind)
    })
}

struct Descent {
    frame: Mat,
    value: f64,
    iterations: usize,
    converged: bool,
}

fn descend(t: &Mat, start: Mat, kind: ObjectiveKind, config: &OptimizerConfig) -> Descent {
    let mut v = start;
    let (mut f, egrad) = value_and_gradient(t, &v, kind);
    let mut g = horizontal(&v, &egrad);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        let gnorm2 = g.frobenius_norm_sqr();
        if libm::sqrt(gnorm2) <= config.grad_tol {
            converged = true;
            break;
        }
        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..64 {
            let candidate = qr_frame(&(&v - &g.scale_real(alpha)));
            let (fc, ec) = value_and_gradient(t, &candidate, kind);
            if fc <= f - config.armijo_slope * alpha * gnorm2 {
                accepted = Some((candidate, fc, ec));
                break;
            }
            alpha *= config.armijo_factor;
        }
        let Some((next, f_next, e_next)) = accepted else {
            break;
        };
        iterations += 1;
        let g_next = horizontal(&next, &e_next);
        // Barzilai-Borwein trial step for the next iteration
        let s = &next - &v;
        let y = &g_next - &g;
        let sy = s.real_inner(&y).abs();
        let bb = s.frobenius_norm_sqr() / sy;
        step = if bb.is_finite() && bb > 0.0 {
            bb.clamp(1e-10, 1e10)
        } else {
            alpha / config.armijo_factor
        };
        v = next;
        f = f_next;
        g = g_next;
    }
    if !converged && libm::sqrt(g.frobenius_norm_sqr()) <= config.grad_tol {
        converged = true;
    }
    Descent {
        frame: v,
        value: f,
        iterations,
        converged,
    }
}

/// Multi-restart Riemannian descent. Deterministic given `config`.
///
/// The analytic gradient is checked against finite differences first and
/// the run is refused if they disagree.
pub fn minimize(
    t: &CMatrix,
    k: usize,
    kind: ObjectiveKind,
    config: &OptimizerConfig,
) -> Result<DistanceResult> {
    config.validate()?;
    let n = t.dim();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "rank {k} must lie in 1..{n}"
        )));
    }
    gradient_check(t, k, kind, config.gradient_check_points, config.seed)?;

    let tm = t.as_mat();
    let mut starts: Vec<StartKind> = Vec::with_capacity(config.restarts);
    if config.warm_starts {
        starts.push(StartKind::Schur);
        starts.push(StartKind::Coordinate);
    }
    let mut stream = 0;
    while starts.len() < config.restarts {
        starts.push(StartKind::Random { stream });
        stream += 1;
    }
    starts.truncate(config.restarts);

    let schur_q = if config.warm_starts {
        Some(schur(t)?.q)
    } else {
        None
    };
    let mut trace = Vec::with_capacity(starts.len());
    let mut best: Option<(f64, Mat)> = None;
    for &start in &starts {
        let v0 = match start {
            StartKind::Schur => schur_q
                .as_ref()
                .expect("computed when warm starts are on")
                .as_mat()
                .column_block(0, k),
            StartKind::Coordinate => Mat::coordinate_frame(n, k),
            StartKind::Random { stream } => SeededStream::new(config.seed, stream).frame(n, k),
        };
        let initial_value = libm::sqrt(value_and_gradient(tm, &v0, kind).0);
        let d = descend(tm, v0, kind, config);
        let final_value = libm::sqrt(d.value);
        trace.push(RestartTrace {
            start,
            initial_value,
            final_value,
            iterations: d.iterations,
            converged: d.converged,
        });
        if best.as_ref().is_none_or(|(b, _)| final_value < *b) {
            best = Some((final_value, d.frame));
        }
    }

    let (_, frame) = best.expect("at least one restart");
    let best_frame = IsometryPoint::new(frame)?;
    let best_projection = best_frame.projection();
    let best_value = objective_value(t, &best_projection, kind);
    Ok(DistanceResult {
        objective: kind,
        k,
        best_value,
        best_projection,
        best_frame,
        restarts: trace.len(),
        converged_restarts: trace.iter().filter(|r| r.converged).count(),
        seed: config.seed,
        config: config.clone(),
        trace,
    })
}

/// Defect of the leading `⌊n/2⌋` coordinate projection against the n×n
/// nilpotent Jordan block: the commutator has one unit entry, so the
/// normalized trace norm is `1/√n`.
pub fn jordan_upper_bound(n: usize) -> f64 {
    1.0 / libm::sqrt(n as f64)
}

/// Half supplier for the compression pipeline driven by [`minimize`] on the
/// invariance objective.
#[derive(Clone, Debug, Default)]
pub struct OptimizerSupplier {
    pub config: OptimizerConfig,
}

impl HalfSupplier for OptimizerSupplier {
    fn frame(&self, block: &CMatrix, rank: usize) -> Result<Mat> {
        if rank == 0 {
            return Ok(Mat::zeros(block.dim(), 0));
        }
        let r = minimize(block, rank, ObjectiveKind::Invariance, &self.config)?;
        Ok(r.best_frame.frame().clone())
    }

    fn name(&self) -> String {
        String::from("optimizer")
    }
}
