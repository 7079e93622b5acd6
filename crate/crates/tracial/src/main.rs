use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tracial::formats::{
    read_matrix, write_csv, write_json, CompressionJson, DistanceJson, FlagJson, LatticeJson,
    LatticeMapJson, MatrixJson,
};
use tracial::harness::{
    compress_bench, compression_holds, gamma_probe, generate, utilization_table, ExperimentSpec,
    Family, KRule, RunDetail, RunRecord, SupplierKind, DISTANCE_TOL, FLAG_TOL,
};
use tracial_core::flags::{dyadic_targets, invariance_defect, schur_flag};
use tracial_core::grassmann::{minimize, objective_value, ObjectiveKind, OptimizerConfig};
use tracial_core::lattice::{
    enumerate_lattice, rank_identity_check, st_ts_isomorphism, sublattice_embedding, StTsOutcome,
};

/// Invariant flags, trace-norm compression, commutator distances and
/// invariant-subspace lattices for finite matrices.
///
/// Exit status: 0 when every contract held, 1 on a contract violation or
/// failed computation, 2 on a usage or input error.
#[derive(Parser)]
#[command(name = "tracial", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Override the contract tolerance of the subcommand.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy)]
enum FamilyArg {
    Ginibre,
    HaarUnitary,
    Jordan,
    UpperRandom,
    File,
}

#[derive(ValueEnum, Clone, Copy)]
enum ObjectiveArg {
    Commutator,
    Invariance,
}

impl From<ObjectiveArg> for ObjectiveKind {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Commutator => ObjectiveKind::Commutator,
            ObjectiveArg::Invariance => ObjectiveKind::Invariance,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum SupplierArg {
    Schur,
    Coordinate,
    Optimizer,
}

#[derive(Args, Clone)]
struct OptimizerArgs {
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
}

impl OptimizerArgs {
    fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            seed,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded sample matrix in the repository JSON format.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Schur flag at dyadic traces, validated (tol: residual, 1e-9).
    Flag {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 2)]
        levels: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Compress a matrix file, or sweep a family (tol: flag residual, 1e-9).
    Compress {
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "matrix")]
        family: Option<FamilyArg>,
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        levels: u32,
        #[arg(long, value_enum, default_value = "schur")]
        supplier: SupplierArg,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Minimize the commutator or invariance defect over rank-k projections
    /// (tol: an upper bound on the value, unchecked when absent).
    Commdist {
        #[arg(long)]
        matrix: PathBuf,
        /// Projection rank; n/2 when absent.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "commutator")]
        objective: ObjectiveArg,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Lattice of S; with --t, compare Lat(ST) and Lat(TS); with --x, the
    /// embedding Lat S → Lat T through X (tol: element invariance, 1e-8).
    Lattice {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        t: Option<PathBuf>,
        #[arg(long, requires = "t")]
        x: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Distance sweep across dimensions (tol: slack on known bounds, 1e-6).
    Probe {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Matrix file for the `file` family.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "commutator")]
        objective: ObjectiveArg,
        /// Fixed projection rank; n/2 when absent.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        common: Common,
    },
}

/// Marks an error as the caller's: bad arguments or unreadable input.
#[derive(Debug)]
struct UsageError(anyhow::Error);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| UsageError(e).into())
}

fn load(path: &Path) -> Result<tracial_core::kernel::CMatrix> {
    usage(read_matrix(path))
}

fn family(arg: FamilyArg, matrix: Option<&Path>) -> Result<Family> {
    Ok(match arg {
        FamilyArg::Ginibre => Family::Ginibre,
        FamilyArg::HaarUnitary => Family::HaarUnitary,
        FamilyArg::Jordan => Family::Jordan,
        FamilyArg::UpperRandom => Family::UpperRandom,
        FamilyArg::File => match matrix {
            Some(path) => Family::File(load(path)?),
            None => return usage(Err(anyhow!("the file family needs --matrix"))),
        },
    })
}

fn output(common: &Common) -> Result<Box<dyn Write>> {
    Ok(match &common.out {
        Some(path) => Box::new(BufWriter::new(usage(
            File::create(path).with_context(|| format!("creating {}", path.display())),
        )?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn json_only(common: &Common, what: &str) -> Result<()> {
    if common.format == Some(Format::Csv) {
        return usage(Err(anyhow!("{what} has no CSV form")));
    }
    Ok(())
}

fn emit_records(common: &Common, records: &[RunRecord], default: Format) -> Result<()> {
    let mut out = output(common)?;
    match common.format.unwrap_or(default) {
        Format::Csv => write_csv(
            &mut out,
            &records.iter().map(RunRecord::csv_row).collect::<Vec<_>>(),
        )?,
        Format::Json => {
            let details = records
                .iter()
                .map(|r| {
                    let detail = match &r.detail {
                        RunDetail::Distance(d) => serde_json::to_value(DistanceJson::from(d))?,
                        RunDetail::Compression(c) => {
                            serde_json::to_value(CompressionJson::from(c.as_ref()))?
                        }
                        RunDetail::Failed(msg) => serde_json::Value::String(msg.clone()),
                    };
                    Ok(serde_json::json!({ "record": r.csv_row(), "detail": detail }))
                })
                .collect::<Result<Vec<_>>>()?;
            write_json(&mut out, &details)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen {
            family: f,
            n,
            common,
        } => {
            json_only(&common, "gen")?;
            if matches!(f, FamilyArg::File) {
                return usage(Err(anyhow!("gen cannot sample the file family")));
            }
            let t = usage(generate(&family(f, None)?, n, common.seed))?;
            let mut out = output(&common)?;
            write_json(&mut out, &MatrixJson(t))?;
            Ok(true)
        }
        Command::Flag {
            matrix,
            levels,
            common,
        } => {
            json_only(&common, "flag")?;
            let t = load(&matrix)?;
            let tol = common.tol.unwrap_or(FLAG_TOL);
            let report = schur_flag(&t, &dyadic_targets(levels))?;
            let mut out = output(&common)?;
            write_json(&mut out, &FlagJson::from_report(&report))?;
            Ok(report.certifies(tol))
        }
        Command::Compress {
            matrix,
            family: fam,
            dims,
            eps,
            levels,
            supplier,
            optimizer,
            common,
        } => {
            let tol = common.tol.unwrap_or(FLAG_TOL);
            let supplier = match supplier {
                SupplierArg::Schur => SupplierKind::Schur,
                SupplierArg::Coordinate => SupplierKind::Coordinate,
                SupplierArg::Optimizer => SupplierKind::Optimizer,
            };
            let (spec, single) = match (matrix, fam) {
                (Some(path), None) => {
                    let t = load(&path)?;
                    (
                        ExperimentSpec::new(Family::File(t.clone()), vec![t.dim()], common.seed),
                        true,
                    )
                }
                (None, Some(f)) => (
                    ExperimentSpec::new(family(f, None)?, dims, common.seed),
                    false,
                ),
                _ => return usage(Err(anyhow!("give exactly one of --matrix and --family"))),
            };
            let spec = ExperimentSpec {
                optimizer: optimizer.config(common.seed),
                ..spec
            };
            let records = usage(compress_bench(&spec, eps, levels, supplier, tol))?;
            eprint!("{}", utilization_table(&records));
            let held = records.iter().all(|r| r.status.held());
            if single && common.format != Some(Format::Csv) {
                let mut out = output(&common)?;
                match &records[0].detail {
                    RunDetail::Compression(report) => {
                        write_json(&mut out, &CompressionJson::from(report.as_ref()))?;
                        out.flush()?;
                        return Ok(compression_holds(report, eps, tol));
                    }
                    RunDetail::Failed(msg) => return Err(anyhow!("{msg}")),
                    RunDetail::Distance(_) => {
                        unreachable!("compress_bench only records compressions")
                    }
                }
            }
            emit_records(
                &common,
                &records,
                if single { Format::Json } else { Format::Csv },
            )?;
            Ok(held)
        }
        Command::Commdist {
            matrix,
            k,
            objective,
            optimizer,
            common,
        } => {
            let t = load(&matrix)?;
            let n = t.dim();
            let k = k.unwrap_or(n / 2);
            let kind = objective.into();
            let result = minimize(&t, k, kind, &usage(Ok(optimizer.config(common.seed)))?)?;
            let recomputed = objective_value(&t, &result.best_projection, kind);
            let held = (recomputed - result.best_value).abs() <= 1e-12 * result.best_value.max(1.0)
                && common.tol.is_none_or(|tol| result.best_value <= tol);
            match common.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let mut out = output(&common)?;
                    write_json(&mut out, &DistanceJson::from(&result))?;
                    out.flush()?;
                }
                Format::Csv => {
                    let record = RunRecord {
                        family: "file".into(),
                        dim: n,
                        seed: common.seed,
                        k,
                        value: Some(result.best_value),
                        bound: common.tol,
                        status: if held {
                            tracial::harness::Status::Ok
                        } else {
                            tracial::harness::Status::Violation
                        },
                        matrix_hash: t.digest_hex(),
                        wall_time: 0.0,
                        detail: RunDetail::Distance(result),
                    };
                    emit_records(&common, &[record], Format::Csv)?;
                }
            }
            Ok(held)
        }
        Command::Lattice {
            matrix,
            t,
            x,
            common,
        } => {
            json_only(&common, "lattice")?;
            let tol = common.tol.unwrap_or(1e-8);
            let s = load(&matrix)?;
            let mut out = output(&common)?;
            let held = match (t, x) {
                (None, _) => {
                    let lattice = enumerate_lattice(&s)?;
                    let (range, kernel) = rank_identity_check(&s)?;
                    let scale = s.frobenius_norm().max(1.0);
                    let invariant = lattice
                        .elements
                        .iter()
                        .all(|e| invariance_defect(&s, e) * (s.dim() as f64).sqrt() <= tol * scale);
                    write_json(&mut out, &LatticeJson::from(&lattice))?;
                    invariant && range + kernel == tracial_core::kernel::Rational::from_integer(1)
                }
                (Some(tpath), None) => {
                    let t = load(&tpath)?;
                    match st_ts_isomorphism(&s, &t)? {
                        StTsOutcome::Isomorphism { forward, backward } => {
                            write_json(
                                &mut out,
                                &serde_json::json!({
                                    "outcome": "isomorphism",
                                    "forward": LatticeMapJson::from(&forward),
                                    "backward": LatticeMapJson::from(&backward),
                                }),
                            )?;
                            forward.is_bijective() && forward.trace_preserving
                        }
                        StTsOutcome::Nontrivial {
                            st_witness,
                            ts_witness,
                        } => {
                            write_json(
                                &mut out,
                                &serde_json::json!({
                                    "outcome": "nontrivial",
                                    "st_witness": MatrixJson(st_witness.matrix().clone()),
                                    "ts_witness": MatrixJson(ts_witness.matrix().clone()),
                                }),
                            )?;
                            true
                        }
                    }
                }
                (Some(tpath), Some(xpath)) => {
                    let (t, x) = (load(&tpath)?, load(&xpath)?);
                    let map = sublattice_embedding(&s, &t, &x)?;
                    write_json(&mut out, &LatticeMapJson::from(&map))?;
                    map.trace_preserving
                }
            };
            out.flush()?;
            Ok(held)
        }
        Command::Probe {
            family: f,
            dims,
            matrix,
            objective,
            k,
            optimizer,
            common,
        } => {
            let tol = common.tol.unwrap_or(DISTANCE_TOL);
            let spec = ExperimentSpec {
                objective: objective.into(),
                k_rule: k.map_or(KRule::Half, KRule::Fixed),
                optimizer: optimizer.config(common.seed),
                ..ExperimentSpec::new(family(f, matrix.as_deref())?, dims, common.seed)
            };
            usage(spec.validate())?;
            let records = gamma_probe(&spec, tol)?;
            emit_records(&common, &records, Format::Csv)?;
            Ok(records.iter().all(|r| r.status.held()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("tracial: a contract did not hold");
            ExitCode::from(1)
        }
        Err(e) if e.is::<UsageError>() => {
            eprintln!("tracial: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("tracial: {e:#}");
            ExitCode::from(1)
        }
    }
}
