use std::path::Path;
use std::process::{Command, Output};

use tracial::formats::{
    read_csv, read_matrix, CompressionJson, DistanceJson, FlagJson, LatticeJson, MatrixJson,
};
use tracial_core::grassmann::objective_value;
use tracial_core::kernel::{operator_norm, trace_norm2, CMatrix};

fn tracial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracial"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_matrix(dir: &Path, name: &str, m: &CMatrix) -> String {
    let path = dir.join(name);
    std::fs::write(
        &path,
        serde_json::to_string(&MatrixJson(m.clone())).unwrap(),
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

fn gen(dir: &Path, family: &str, n: usize, seed: u64) -> String {
    let path = dir.join(format!("{family}_{n}_{seed}.json"));
    let p = path.to_str().unwrap();
    let out = tracial(&[
        "gen",
        "--family",
        family,
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        p,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    p.to_owned()
}

/// Drops the `wall_time` column, the only one allowed to differ.
fn without_time(csv: &[u8]) -> Vec<String> {
    let text = std::str::from_utf8(csv).unwrap();
    text.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_owned())
        .collect()
}

#[test]
fn generated_matrices_reload_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "ginibre", 9, 4);
    let m = read_matrix(Path::new(&path)).unwrap();
    assert_eq!(m.dim(), 9);
    assert!((operator_norm(&m) - 1.0).abs() <= 1e-10);
    let again = read_matrix(Path::new(&gen(dir.path(), "ginibre", 9, 4))).unwrap();
    assert_eq!(m.digest(), again.digest());
}

#[test]
fn flag_report_revalidates_after_reload() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "ginibre", 12, 1);
    let out = tracial(&["flag", "--matrix", &path, "--levels", "3"]);
    assert_eq!(code(&out), 0);
    let report: FlagJson = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.trace_targets.len(), 9);
    let t = read_matrix(Path::new(&path)).unwrap();
    let again = report.revalidate(&t).unwrap();
    assert!(again.max_residual <= 1e-9);
    assert_eq!(&again.residuals, report.residuals.as_ref().unwrap());
}

#[test]
fn compression_report_revalidates_after_reload() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "ginibre", 16, 2);
    let report_path = dir.path().join("report.json");
    let out = tracial(&[
        "compress",
        "--matrix",
        &path,
        "--eps",
        "0.1",
        "--levels",
        "2",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: CompressionJson =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let (source, result) = (&report.source.0, &report.result.0);
    assert_eq!(source, &read_matrix(Path::new(&path)).unwrap());
    assert_eq!(trace_norm2(&(result - source)), report.total_perturbation);
    assert!(report.total_perturbation < 0.1);
    assert!(operator_norm(result) <= 1.0 + 1e-12);
    assert!(report.flag.revalidate(result).unwrap().max_residual <= 1e-9);
    assert_eq!(report.steps.len(), 2);
}

#[test]
fn distance_result_reproduces_its_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "ginibre", 6, 3);
    let out = tracial(&["commdist", "--matrix", &path, "--k", "2", "--restarts", "4"]);
    assert_eq!(code(&out), 0);
    let d: DistanceJson = serde_json::from_slice(&out.stdout).unwrap();
    let t = read_matrix(Path::new(&path)).unwrap();
    let value = objective_value(&t, &d.projection().unwrap(), d.objective_kind().unwrap());
    assert!((value - d.best_value).abs() <= 1e-12);
    assert_eq!(d.trace.len(), 4);
}

#[test]
fn lattice_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_matrix(
        dir.path(),
        "s.json",
        &CMatrix::real_diagonal(&[1.0, 2.0, 3.0]),
    );
    let out = tracial(&["lattice", "--matrix", &s]);
    assert_eq!(code(&out), 0);
    let l: LatticeJson = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(l.elements.len(), 8);
    assert_eq!(l.traces[7], "1/1");
    assert_eq!(l.join_table[1][2], 3);

    let t = gen(dir.path(), "ginibre", 3, 8);
    let out = tracial(&["lattice", "--matrix", &s, "--t", &t]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "isomorphism");

    let x = write_matrix(
        dir.path(),
        "x.json",
        &CMatrix::real_diagonal(&[1.0, 0.0, 1.0]),
    );
    let out = tracial(&["lattice", "--matrix", &s, "--t", &s, "--x", &x]);
    assert_eq!(code(&out), 1);
}

#[test]
fn probe_and_compress_csv_are_reproducible() {
    let runs = [
        vec![
            "probe",
            "--family",
            "jordan",
            "--dims",
            "4,8,16",
            "--restarts",
            "3",
            "--seed",
            "5",
        ],
        vec![
            "probe",
            "--family",
            "ginibre",
            "--dims",
            "6,3",
            "--restarts",
            "3",
            "--seed",
            "5",
        ],
        vec![
            "compress", "--family", "ginibre", "--dims", "8,16", "--eps", "0.1", "--seed", "7",
        ],
    ];
    for args in runs {
        let a = tracial(&args);
        let b = tracial(&args);
        assert_eq!(
            code(&a),
            0,
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(without_time(&a.stdout), without_time(&b.stdout), "{args:?}");
        let rows = read_csv(a.stdout.as_slice()).unwrap();
        assert!(rows.windows(2).all(|w| w[0].n < w[1].n));
    }
}

#[test]
fn probe_statuses() {
    let out = tracial(&[
        "probe",
        "--family",
        "ginibre",
        "--dims",
        "4",
        "--restarts",
        "2",
    ]);
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows[0].status, "exploratory");
    assert_eq!(rows[0].bound, None);
    let out = tracial(&[
        "probe",
        "--family",
        "haar-unitary",
        "--dims",
        "5",
        "--restarts",
        "2",
    ]);
    let rows = read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!((rows[0].status.as_str(), rows[0].bound), ("ok", Some(0.0)));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage errors
    assert_eq!(code(&tracial(&["probe", "--family", "jordan"])), 2);
    assert_eq!(
        code(&tracial(&["flag", "--matrix", "/nonexistent.json"])),
        2
    );
    assert_eq!(
        code(&tracial(&["probe", "--family", "jordan", "--dims", "1"])),
        2
    );
    assert_eq!(
        code(&tracial(&[
            "gen", "--family", "jordan", "--n", "3", "--format", "csv"
        ])),
        2
    );
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":2,"re":[[1]],"im":[[0]]}"#).unwrap();
    assert_eq!(
        code(&tracial(&["flag", "--matrix", bad.to_str().unwrap()])),
        2
    );
    // contract violations
    let j = write_matrix(dir.path(), "j.json", &CMatrix::jordan(4));
    assert_eq!(
        code(&tracial(&[
            "commdist",
            "--matrix",
            &j,
            "--restarts",
            "2",
            "--tol",
            "0.1"
        ])),
        1
    );
    assert_eq!(
        code(&tracial(&[
            "commdist",
            "--matrix",
            &j,
            "--restarts",
            "2",
            "--tol",
            "0.6"
        ])),
        0
    );
    let out = tracial(&[
        "compress",
        "--family",
        "ginibre",
        "--dims",
        "8",
        "--eps",
        "0.1",
        "--supplier",
        "coordinate",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(read_csv(out.stdout.as_slice()).unwrap()[0].status, "failed");
}
