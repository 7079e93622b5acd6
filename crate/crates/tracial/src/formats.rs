//! JSON and CSV encodings.
//!
//! Matrices are `{"n": n, "re": [[..]], "im": [[..]]}` with row-major
//! arrays. Entries are written with 17 significant digits so that every
//! `f64` survives a write/read cycle bit for bit. Rationals are `"p/q"`.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use tracial_core::compress::{CompressionReport, CompressionStep, ParameterSchedule};
use tracial_core::flags::{validate_flag, Flag, FlagReport};
use tracial_core::grassmann::{
    DistanceResult, ObjectiveKind, OptimizerConfig, RestartTrace, StartKind,
};
use tracial_core::kernel::{CMatrix, OrthoProjection, Rational, C64};
use tracial_core::lattice::{InvariantLattice, LatticeMap};

/// A matrix in the repository file format.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixJson(pub CMatrix);

fn raw_number(x: f64) -> Result<Box<RawValue>, serde_json::Error> {
    if !x.is_finite() {
        return Err(serde_json::Error::custom(format!("non-finite entry {x}")));
    }
    RawValue::from_string(format!("{x:.16e}"))
}

#[derive(Serialize)]
struct MatrixOut {
    n: usize,
    re: Vec<Vec<Box<RawValue>>>,
    im: Vec<Vec<Box<RawValue>>>,
}

#[derive(Deserialize)]
struct MatrixIn {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for MatrixJson {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let m = &self.0;
        let n = m.dim();
        let part = |f: fn(C64) -> f64| {
            (0..n)
                .map(|i| (0..n).map(|j| raw_number(f(m[(i, j)]))).collect())
                .collect::<Result<Vec<Vec<_>>, _>>()
        };
        let out = MatrixOut {
            n,
            re: part(|z| z.re).map_err(serde::ser::Error::custom)?,
            im: part(|z| z.im).map_err(serde::ser::Error::custom)?,
        };
        out.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatrixJson {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = MatrixIn::deserialize(deserializer)?;
        if m.re.len() != m.n {
            return Err(D::Error::custom(format!(
                "\"n\" is {} but \"re\" has {} rows",
                m.n,
                m.re.len()
            )));
        }
        CMatrix::from_parts(&m.re, &m.im)
            .map(MatrixJson)
            .map_err(D::Error::custom)
    }
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m: MatrixJson = serde_json::from_str(&text)
        .with_context(|| format!("parsing matrix file {}", path.display()))?;
    Ok(m.0)
}

pub fn matrix_from_reader(reader: impl Read) -> Result<CMatrix> {
    let m: MatrixJson = serde_json::from_reader(reader)?;
    Ok(m.0)
}

pub fn write_json<T: Serialize>(mut w: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn rational_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(s: &str) -> Result<Rational> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| anyhow!("rational {s:?} is not p/q"))?;
    let (p, q): (u64, u64) = (p.trim().parse()?, q.trim().parse()?);
    if q == 0 {
        bail!("rational {s:?} has a zero denominator");
    }
    Ok(Rational::new(p, q))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlagJson {
    pub projections: Vec<MatrixJson>,
    pub trace_targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Vec<f64>>,
}

impl FlagJson {
    pub fn from_flag(flag: &Flag) -> Self {
        FlagJson {
            projections: flag
                .projections()
                .iter()
                .map(|p| MatrixJson(p.matrix().clone()))
                .collect(),
            trace_targets: flag.trace_targets().iter().map(rational_str).collect(),
            residuals: None,
        }
    }

    pub fn from_report(report: &FlagReport) -> Self {
        FlagJson {
            residuals: Some(report.residuals.clone()),
            ..Self::from_flag(&report.flag)
        }
    }

    /// Rebuilds the flag. Ranks are read off the rounded traces; the
    /// caller re-validates everything else.
    pub fn to_flag(&self) -> Result<Flag> {
        let targets = self
            .trace_targets
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        let projections = self
            .projections
            .iter()
            .map(|m| {
                let tr: f64 = m.0.diag().iter().map(|z| z.re).sum();
                let rank = tr.round().max(0.0) as usize;
                Ok(OrthoProjection::from_matrix(m.0.clone(), rank)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Flag::from_parts(projections, targets))
    }

    /// Reloads the flag and recomputes its report against `t`.
    pub fn revalidate(&self, t: &CMatrix) -> Result<FlagReport> {
        Ok(validate_flag(t, &self.to_flag()?)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleJson {
    pub eps: f64,
    pub stage_budgets: Vec<f64>,
    pub delta: Vec<f64>,
    pub eps1: Vec<f64>,
}

impl From<&ParameterSchedule> for ScheduleJson {
    fn from(s: &ParameterSchedule) -> Self {
        ScheduleJson {
            eps: s.eps,
            stage_budgets: s.stage_budgets.clone(),
            delta: s.delta.clone(),
            eps1: s.eps1.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepJson {
    pub stage: usize,
    pub budget: f64,
    pub delta: f64,
    pub eps1: f64,
    pub block_defects: Vec<f64>,
    pub truncated_ranks: Vec<usize>,
    pub perturbation: f64,
    pub rescale_factor: f64,
}

impl From<&CompressionStep> for StepJson {
    fn from(s: &CompressionStep) -> Self {
        StepJson {
            stage: s.stage,
            budget: s.budget,
            delta: s.delta,
            eps1: s.eps1,
            block_defects: s.block_defects.clone(),
            truncated_ranks: s.truncated_ranks.clone(),
            perturbation: s.perturbation,
            rescale_factor: s.rescale_factor,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompressionJson {
    pub supplier: String,
    pub schedule: ScheduleJson,
    pub total_perturbation: f64,
    pub source: MatrixJson,
    pub result: MatrixJson,
    pub steps: Vec<StepJson>,
    pub flag: FlagJson,
}

impl From<&CompressionReport> for CompressionJson {
    fn from(r: &CompressionReport) -> Self {
        CompressionJson {
            supplier: r.supplier.clone(),
            schedule: (&r.schedule).into(),
            total_perturbation: r.total_perturbation,
            source: MatrixJson(r.source.clone()),
            result: MatrixJson(r.result.clone()),
            steps: r.steps.iter().map(Into::into).collect(),
            flag: FlagJson::from_report(&r.flag_report),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub restarts: usize,
    pub max_iterations: usize,
    pub grad_tol: f64,
    pub armijo_factor: f64,
    pub armijo_slope: f64,
    pub seed: u64,
    pub warm_starts: bool,
    pub gradient_check_points: usize,
}

impl From<&OptimizerConfig> for ConfigJson {
    fn from(c: &OptimizerConfig) -> Self {
        ConfigJson {
            restarts: c.restarts,
            max_iterations: c.max_iterations,
            grad_tol: c.grad_tol,
            armijo_factor: c.armijo_factor,
            armijo_slope: c.armijo_slope,
            seed: c.seed,
            warm_starts: c.warm_starts,
            gradient_check_points: c.gradient_check_points,
        }
    }
}

impl From<&ConfigJson> for OptimizerConfig {
    fn from(c: &ConfigJson) -> Self {
        OptimizerConfig {
            restarts: c.restarts,
            max_iterations: c.max_iterations,
            grad_tol: c.grad_tol,
            armijo_factor: c.armijo_factor,
            armijo_slope: c.armijo_slope,
            seed: c.seed,
            warm_starts: c.warm_starts,
            gradient_check_points: c.gradient_check_points,
        }
    }
}

/// `"schur"`, `"coordinate"` or `"random:<stream>"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StartJson(pub StartKind);

impl fmt::Display for StartJson {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            StartKind::Schur => f.write_str("schur"),
            StartKind::Coordinate => f.write_str("coordinate"),
            StartKind::Random { stream } => write!(f, "random:{stream}"),
        }
    }
}

impl FromStr for StartJson {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(StartJson(match s {
            "schur" => StartKind::Schur,
            "coordinate" => StartKind::Coordinate,
            _ => match s.strip_prefix("random:") {
                Some(stream) => StartKind::Random {
                    stream: stream.parse()?,
                },
                None => bail!("unknown start {s:?}"),
            },
        }))
    }
}

impl Serialize for StartJson {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StartJson {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartJson {
    pub start: StartJson,
    pub initial_value: f64,
    pub final_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl From<&RestartTrace> for RestartJson {
    fn from(r: &RestartTrace) -> Self {
        RestartJson {
            start: StartJson(r.start),
            initial_value: r.initial_value,
            final_value: r.final_value,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceJson {
    pub objective: String,
    pub n: usize,
    pub k: usize,
    pub best_value: f64,
    pub seed: u64,
    pub restarts: usize,
    pub converged_restarts: usize,
    pub config: ConfigJson,
    pub best_projection: MatrixJson,
    pub trace: Vec<RestartJson>,
}

impl From<&DistanceResult> for DistanceJson {
    fn from(d: &DistanceResult) -> Self {
        DistanceJson {
            objective: d.objective.as_str().to_owned(),
            n: d.best_projection.dim(),
            k: d.k,
            best_value: d.best_value,
            seed: d.seed,
            restarts: d.restarts,
            converged_restarts: d.converged_restarts,
            config: (&d.config).into(),
            best_projection: MatrixJson(d.best_projection.matrix().clone()),
            trace: d.trace.iter().map(Into::into).collect(),
        }
    }
}

impl DistanceJson {
    pub fn objective_kind(&self) -> Result<ObjectiveKind> {
        self.objective.parse().map_err(|e| anyhow!("{e}"))
    }

    pub fn projection(&self) -> Result<OrthoProjection> {
        Ok(OrthoProjection::from_matrix(
            self.best_projection.0.clone(),
            self.k,
        )?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementJson {
    /// Bitmask of the eigenvectors spanning the element.
    pub mask: usize,
    pub rank: usize,
    pub trace: String,
    pub projection: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeJson {
    pub source: MatrixJson,
    pub eigenvalues: Vec<[f64; 2]>,
    pub elements: Vec<ElementJson>,
    pub join_table: Vec<Vec<usize>>,
    pub meet_table: Vec<Vec<usize>>,
    pub traces: Vec<String>,
}

impl From<&InvariantLattice> for LatticeJson {
    fn from(l: &InvariantLattice) -> Self {
        let len = l.len();
        let table = |f: &dyn Fn(usize, usize) -> usize| {
            (0..len)
                .map(|a| (0..len).map(|b| f(a, b)).collect())
                .collect()
        };
        LatticeJson {
            source: MatrixJson(l.source.clone()),
            eigenvalues: l.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            elements: l
                .elements
                .iter()
                .enumerate()
                .map(|(mask, e)| ElementJson {
                    mask,
                    rank: e.rank(),
                    trace: rational_str(&l.trace_list[mask]),
                    projection: MatrixJson(e.matrix().clone()),
                })
                .collect(),
            join_table: table(&|a, b| l.join(a, b)),
            meet_table: table(&|a, b| l.meet(a, b)),
            traces: l.trace_list.iter().map(rational_str).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeMapJson {
    pub intertwiner: MatrixJson,
    /// `forward[i]` is the target index of source element `i`.
    pub forward: Vec<usize>,
    pub bijective: bool,
    pub trace_preserving: bool,
    pub source_traces: Vec<String>,
    pub target_traces: Vec<String>,
}

impl From<&LatticeMap> for LatticeMapJson {
    fn from(m: &LatticeMap) -> Self {
        LatticeMapJson {
            intertwiner: MatrixJson(m.intertwiner.clone()),
            forward: m.forward.clone(),
            bijective: m.is_bijective(),
            trace_preserving: m.trace_preserving,
            source_traces: m.source.trace_list.iter().map(rational_str).collect(),
            target_traces: m.target.trace_list.iter().map(rational_str).collect(),
        }
    }
}

/// One CSV row per run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub k: usize,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub status: String,
    pub matrix_hash: String,
    pub wall_time: f64,
}

pub const CSV_HEADER: [&str; 9] = [
    "family",
    "n",
    "seed",
    "k",
    "value",
    "bound",
    "status",
    "matrix_hash",
    "wall_time",
];

pub fn write_csv(w: impl Write, rows: &[CsvRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(CSV_HEADER)?;
    }
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv(r: impl Read) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(Into::into))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use tracial_core::flags::{dyadic_targets, schur_flag};
    use tracial_core::random::SeededStream;

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        for seed in 0..20 {
            let t = SeededStream::new(seed, 0).ginibre(1 + seed as usize % 9);
            let text = serde_json::to_string(&MatrixJson(t.clone())).unwrap();
            let back: MatrixJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back.0.digest(), t.digest());
        }
        let awkward =
            CMatrix::from_real_rows(&[&[0.1, -0.0], &[f64::MIN_POSITIVE, 1e300]]).unwrap();
        let text = serde_json::to_string(&MatrixJson(awkward.clone())).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.0.digest(), awkward.digest());
    }

    #[test]
    fn entries_carry_seventeen_digits() {
        let t = CMatrix::from_real_rows(&[&[1.0 / 3.0]]).unwrap();
        let text = serde_json::to_string(&MatrixJson(t)).unwrap();
        assert_eq!(
            text,
            r#"{"n":1,"re":[[3.3333333333333331e-1]],"im":[[0.0000000000000000e0]]}"#
        );
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        for bad in [
            r#"{"n":2,"re":[[1,2]],"im":[[0,0]]}"#,
            r#"{"n":1,"re":[[1,2]],"im":[[0,0]]}"#,
            r#"{"n":1,"re":[[1]]}"#,
            r#"{"n":1,"re":[["x"]],"im":[[0]]}"#,
        ] {
            assert!(serde_json::from_str::<MatrixJson>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn flag_report_round_trip_revalidates() {
        let t = SeededStream::new(3, 0).ginibre(8);
        let report = schur_flag(&t, &dyadic_targets(2)).unwrap();
        let text = serde_json::to_string(&FlagJson::from_report(&report)).unwrap();
        let back: FlagJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.residuals.as_ref().unwrap(), &report.residuals);
        let again = back.revalidate(&t).unwrap();
        assert_eq!(again.residuals, report.residuals);
    }

    #[test]
    fn start_kinds_round_trip() {
        for s in [
            StartKind::Schur,
            StartKind::Coordinate,
            StartKind::Random { stream: 17 },
        ] {
            let text = StartJson(s).to_string();
            assert_eq!(text.parse::<StartJson>().unwrap().0, s);
        }
        assert!("random:x".parse::<StartJson>().is_err());
    }

    #[test]
    fn csv_rows_round_trip() {
        let rows = vec![
            CsvRow {
                family: "jordan".into(),
                n: 4,
                seed: 1,
                k: 2,
                value: Some(0.5),
                bound: Some(0.5),
                status: "ok".into(),
                matrix_hash: "ab".into(),
                wall_time: 0.25,
            },
            CsvRow {
                family: "ginibre".into(),
                n: 8,
                seed: 1,
                k: 4,
                value: None,
                bound: None,
                status: "failed".into(),
                matrix_hash: "cd".into(),
                wall_time: 0.0,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("family,n,seed,k,value,bound,status,matrix_hash,wall_time\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }
}
