//! Seeded generators and the two experiment drivers.
//!
//! Every matrix is a pure function of `(family, n, seed)`: dimension `n`
//! draws from stream `n` of the seed, so adding or removing a dimension
//! from a sweep never changes the others.

use std::fmt;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use tracial_core::compress::{
    dyadic_compress, CompressionReport, CoordinateSupplier, HalfSupplier, SchurSupplier,
};
use tracial_core::grassmann::{
    jordan_upper_bound, minimize, DistanceResult, ObjectiveKind, OptimizerConfig, OptimizerSupplier,
};
use tracial_core::kernel::{operator_norm, CMatrix, ZERO};
use tracial_core::random::SeededStream;

use crate::formats::CsvRow;

pub const MAX_DIM: usize = 256;
/// Defaults for `tol`: flag residuals, and distances that should vanish.
pub const FLAG_TOL: f64 = 1e-9;
pub const DISTANCE_TOL: f64 = 1e-6;
pub const NORM_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Ginibre,
    HaarUnitary,
    Jordan,
    UpperRandom,
    /// A fixed matrix loaded from disk; only its own dimension is valid.
    File(CMatrix),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Ginibre => "ginibre",
            Family::HaarUnitary => "haar_unitary",
            Family::Jordan => "jordan",
            Family::UpperRandom => "upper_random",
            Family::File(_) => "file",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn unit_norm(t: CMatrix) -> CMatrix {
    let norm = operator_norm(&t);
    if norm > 0.0 {
        t.scale(1.0 / norm)
    } else {
        t
    }
}

/// Deterministic sample of `family` at dimension `n`.
pub fn generate(family: &Family, n: usize, seed: u64) -> Result<CMatrix> {
    if n < 2 {
        bail!("dimension {n} is below 2");
    }
    let mut rng = SeededStream::new(seed, n as u64);
    Ok(match family {
        Family::Ginibre => unit_norm(rng.ginibre(n)),
        Family::HaarUnitary => rng.haar_unitary(n),
        Family::Jordan => CMatrix::jordan(n),
        Family::UpperRandom => {
            let g = rng.ginibre(n);
            unit_norm(CMatrix::from_fn(
                n,
                |i, j| if j >= i { g[(i, j)] } else { ZERO },
            ))
        }
        Family::File(m) => {
            if m.dim() != n {
                bail!("the file matrix has dimension {}, not {n}", m.dim());
            }
            m.clone()
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KRule {
    Half,
    Fixed(usize),
}

impl KRule {
    pub fn rank(self, n: usize) -> usize {
        match self {
            KRule::Half => n / 2,
            KRule::Fixed(k) => k,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub family: Family,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub objective: ObjectiveKind,
    pub k_rule: KRule,
    pub optimizer: OptimizerConfig,
}

impl ExperimentSpec {
    pub fn new(family: Family, dims: Vec<usize>, seed: u64) -> Self {
        ExperimentSpec {
            family,
            dims,
            seed,
            objective: ObjectiveKind::Commutator,
            k_rule: KRule::Half,
            optimizer: OptimizerConfig {
                seed,
                ..OptimizerConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            bail!("no dimensions given");
        }
        if let Some(&n) = self.dims.iter().find(|&&n| !(2..=MAX_DIM).contains(&n)) {
            bail!("dimension {n} is outside 2..={MAX_DIM}");
        }
        if let KRule::Fixed(k) = self.k_rule {
            if let Some(&n) = self.dims.iter().find(|&&n| k == 0 || k >= n) {
                bail!("rank {k} must lie in 1..{n}");
            }
        }
        if let Family::File(m) = &self.family {
            if self.dims.iter().any(|&n| n != m.dim()) {
                bail!("the file family only has dimension {}", m.dim());
            }
        }
        self.optimizer.validate()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Every contract the run is subject to held.
    Ok,
    Violation,
    /// No contract applies; the value is recorded as evidence only.
    Exploratory,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Violation => "violation",
            Status::Exploratory => "exploratory",
            Status::Failed => "failed",
        }
    }

    pub fn held(self) -> bool {
        matches!(self, Status::Ok | Status::Exploratory)
    }
}

#[derive(Clone, Debug)]
pub enum RunDetail {
    Distance(DistanceResult),
    Compression(Box<CompressionReport>),
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub family: String,
    pub dim: usize,
    pub seed: u64,
    /// Projection rank for probes, level count for compressions.
    pub k: usize,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub status: Status,
    pub matrix_hash: String,
    pub wall_time: f64,
    pub detail: RunDetail,
}

impl RunRecord {
    pub fn csv_row(&self) -> CsvRow {
        CsvRow {
            family: self.family.clone(),
            n: self.dim,
            seed: self.seed,
            k: self.k,
            value: self.value,
            bound: self.bound,
            status: self.status.as_str().to_owned(),
            matrix_hash: self.matrix_hash.clone(),
            wall_time: self.wall_time,
        }
    }
}

/// The bound a probe value is held to, if any. Invariant subspaces exist
/// in every dimension, normal matrices commute with a spectral projection,
/// and the Jordan block has its corner projection.
pub fn probe_bound(family: &Family, objective: ObjectiveKind, n: usize, k: usize) -> Option<f64> {
    match (objective, family) {
        (ObjectiveKind::Invariance, _) => Some(0.0),
        (ObjectiveKind::Commutator, Family::HaarUnitary) => Some(0.0),
        (ObjectiveKind::Commutator, Family::Jordan) if k == n / 2 => Some(jordan_upper_bound(n)),
        _ => None,
    }
}

fn sorted_by_dim(mut records: Vec<RunRecord>) -> Vec<RunRecord> {
    records.sort_by_key(|r| r.dim);
    records
}

/// Minimizes the chosen objective at every dimension.
pub fn gamma_probe(spec: &ExperimentSpec, tol: f64) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let records = spec
        .dims
        .par_iter()
        .map(|&n| -> Result<RunRecord> {
            let t = generate(&spec.family, n, spec.seed)?;
            let k = spec.k_rule.rank(n);
            let start = Instant::now();
            let result = minimize(&t, k, spec.objective, &spec.optimizer)
                .with_context(|| format!("optimizer failed at dimension {n}"))?;
            let wall_time = start.elapsed().as_secs_f64();
            let bound = probe_bound(&spec.family, spec.objective, n, k);
            let status = match bound {
                Some(b) if result.best_value <= b + tol => Status::Ok,
                Some(_) => Status::Violation,
                None => Status::Exploratory,
            };
            Ok(RunRecord {
                family: spec.family.name().to_owned(),
                dim: n,
                seed: spec.seed,
                k,
                value: Some(result.best_value),
                bound,
                status,
                matrix_hash: t.digest_hex(),
                wall_time,
                detail: RunDetail::Distance(result),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sorted_by_dim(records))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupplierKind {
    Schur,
    Coordinate,
    Optimizer,
}

/// Whether a report meets its own contracts.
pub fn compression_holds(report: &CompressionReport, eps: f64, tol: f64) -> bool {
    operator_norm(&report.result) <= 1.0 + NORM_SLACK
        && report.total_perturbation < eps
        && report.flag_report.max_residual <= tol
}

/// Runs the compression pipeline at every dimension. A failed stage is
/// recorded against its dimension and the sweep continues.
pub fn compress_bench(
    spec: &ExperimentSpec,
    eps: f64,
    levels: u32,
    supplier: SupplierKind,
    tol: f64,
) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    if !(eps > 0.0 && eps.is_finite()) {
        bail!("eps must be positive and finite, got {eps}");
    }
    let optimizer = OptimizerSupplier {
        config: spec.optimizer.clone(),
    };
    let supplier: &(dyn HalfSupplier + Sync) = match supplier {
        SupplierKind::Schur => &SchurSupplier,
        SupplierKind::Coordinate => &CoordinateSupplier,
        SupplierKind::Optimizer => &optimizer,
    };
    let records = spec
        .dims
        .par_iter()
        .map(|&n| -> Result<RunRecord> {
            let t = generate(&spec.family, n, spec.seed)?;
            let start = Instant::now();
            let outcome = dyadic_compress(&t, eps, levels, supplier);
            let wall_time = start.elapsed().as_secs_f64();
            let (value, status, detail) = match outcome {
                Ok(report) => {
                    let status = if compression_holds(&report, eps, tol) {
                        Status::Ok
                    } else {
                        Status::Violation
                    };
                    (
                        Some(report.total_perturbation),
                        status,
                        RunDetail::Compression(Box::new(report)),
                    )
                }
                Err(e) => (None, Status::Failed, RunDetail::Failed(e.to_string())),
            };
            Ok(RunRecord {
                family: spec.family.name().to_owned(),
                dim: n,
                seed: spec.seed,
                k: levels as usize,
                value,
                bound: Some(eps),
                status,
                matrix_hash: t.digest_hex(),
                wall_time,
                detail,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sorted_by_dim(records))
}

/// Per-stage perturbation against budget for every successful compression.
pub fn utilization_table(records: &[RunRecord]) -> String {
    let mut out = format!(
        "{:>5} {:>5} {:>13} {:>13} {:>7}\n",
        "n", "stage", "perturbation", "budget", "used"
    );
    for r in records {
        match &r.detail {
            RunDetail::Compression(report) => {
                for s in &report.steps {
                    out.push_str(&format!(
                        "{:>5} {:>5} {:>13.6e} {:>13.6e} {:>6.2}%\n",
                        r.dim,
                        s.stage,
                        s.perturbation,
                        s.budget,
                        100.0 * s.perturbation / s.budget
                    ));
                }
            }
            RunDetail::Failed(msg) => out.push_str(&format!("{:>5} failed: {msg}\n", r.dim)),
            RunDetail::Distance(_) => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tracial_core::kernel::ONE;

    #[test]
    fn generators_meet_their_descriptions() {
        let j = generate(&Family::Jordan, 3, 0).unwrap();
        assert_eq!(
            j,
            CMatrix::from_fn(3, |i, k| if k == i + 1 { ONE } else { ZERO })
        );
        for n in [2, 7, 20] {
            let u = generate(&Family::HaarUnitary, n, 5).unwrap();
            let defect = (&(&u.adjoint() * &u) - &CMatrix::identity(n)).frobenius_norm();
            assert!(defect <= 1e-12 * n as f64);
            let g = generate(&Family::Ginibre, n, 5).unwrap();
            assert!((operator_norm(&g) - 1.0).abs() <= 1e-10);
            let up = generate(&Family::UpperRandom, n, 5).unwrap();
            assert!(operator_norm(&up) <= 1.0 + 1e-10);
            assert!((0..n).all(|i| (0..i).all(|k| up[(i, k)] == ZERO)));
        }
    }

    #[test]
    fn generation_is_deterministic_per_dimension() {
        let a = generate(&Family::Ginibre, 6, 11).unwrap();
        assert_eq!(
            a.digest(),
            generate(&Family::Ginibre, 6, 11).unwrap().digest()
        );
        assert_ne!(
            a.digest(),
            generate(&Family::Ginibre, 6, 12).unwrap().digest()
        );
        assert!(generate(&Family::Ginibre, 1, 0).is_err());
        let file = Family::File(a.clone());
        assert_eq!(generate(&file, 6, 99).unwrap(), a);
        assert!(generate(&file, 5, 0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(ExperimentSpec::new(Family::Jordan, vec![], 0)
            .validate()
            .is_err());
        assert!(ExperimentSpec::new(Family::Jordan, vec![1], 0)
            .validate()
            .is_err());
        assert!(ExperimentSpec::new(Family::Jordan, vec![257], 0)
            .validate()
            .is_err());
        let mut spec = ExperimentSpec::new(Family::Jordan, vec![4, 8], 0);
        assert!(spec.validate().is_ok());
        spec.k_rule = KRule::Fixed(4);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn jordan_probe_respects_corner_bound() {
        let mut spec = ExperimentSpec::new(Family::Jordan, vec![16, 4], 0);
        spec.optimizer.restarts = 3;
        let records = gamma_probe(&spec, DISTANCE_TOL).unwrap();
        assert_eq!(
            records.iter().map(|r| r.dim).collect::<Vec<_>>(),
            vec![4, 16]
        );
        for r in &records {
            assert_eq!(r.status, Status::Ok);
            assert_eq!(r.bound, Some(1.0 / (r.dim as f64).sqrt()));
        }
    }

    #[test]
    fn upper_triangular_inputs_need_no_perturbation() {
        let spec = ExperimentSpec::new(Family::UpperRandom, vec![8, 16], 2);
        for r in compress_bench(&spec, 0.1, 2, SupplierKind::Coordinate, FLAG_TOL).unwrap() {
            assert_eq!(r.status, Status::Ok);
            assert!(r.value.unwrap() <= 1e-12);
        }
    }

    #[test]
    fn stage_failures_are_recorded() {
        let spec = ExperimentSpec::new(Family::Ginibre, vec![8, 4], 0);
        let records = compress_bench(&spec, 0.1, 2, SupplierKind::Coordinate, FLAG_TOL).unwrap();
        assert_eq!(records.len(), 2);
        for r in &records {
            assert_eq!(r.status, Status::Failed);
            assert!(r.value.is_none());
        }
        assert!(utilization_table(&records).contains("failed"));
    }
}
