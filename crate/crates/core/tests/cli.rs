//! End-to-end runs of the command-line front end.

use std::fs;
use std::path::Path;
use std::process::Command;

use bellspace::cli::{self, read_records};
use bellspace::montecarlo::estimate;
use serde_json::Value;

const CANONICAL: &str = "[angles]\na = [0.0, 45.0]\nb = [22.5, -22.5]\n";

const CORRELATED: &str = "\
[settings]
weights = [[0.5, 0.0], [0.0, 0.5]]
[table]
q11 = [0.25, 0.25, 0.25, 0.25]
q12 = [0.25, 0.25, 0.25, 0.25]
q21 = [0.25, 0.25, 0.25, 0.25]
q22 = [0.25, 0.25, 0.25, 0.25]
";

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["bellspace"];
    full.extend_from_slice(args);
    let code = cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn analyze_canonical_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CANONICAL);
    let (code, out, _) = run(&["analyze", "--config", &cfg, "--format", "json"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["chsh"]["s_cond"].as_f64().unwrap(), 2.82842712475);
    assert!((r["chsh"]["s_abs"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert_eq!(r["fine"]["verdict"]["verdict"], "infeasible");
    assert_eq!(r["structural_ok"], true);
    assert_eq!(r["counterfactual_mass"].as_f64().unwrap(), 0.0);

    let (code, text, _) = run(&["analyze", "--config", &cfg, "--exact-lp"]);
    assert_eq!(code, 0);
    assert!(text.contains("S_cond = 2.82842712475"), "{text}");
    assert!(text.contains("Fine: infeasible"), "{text}");
}

#[test]
fn analyze_reports_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CANONICAL);
    let (_, a, _) = run(&["analyze", "--config", &cfg, "--format", "json"]);
    let (_, b, _) = run(&["analyze", "--config", &cfg, "--format", "json"]);
    assert_eq!(a, b);
    let parsed = json(&a);
    let keys: Vec<&String> = parsed.as_object().unwrap().keys().collect();
    assert_eq!(keys[0], "source");
    assert_eq!(keys.last().unwrap().as_str(), "structural_ok");
}

#[test]
fn analyze_correlated_settings_lists_lig_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CORRELATED);
    let (code, out, _) = run(&["analyze", "--config", &cfg]);
    assert_eq!(code, 0);
    assert!(out.contains("LIG: FAIL (max deviation 0.25)"), "{out}");
    let (_, out, _) = run(&["analyze", "--config", &cfg, "--format", "json"]);
    assert_eq!(json(&out)["locality"]["lig"]["max_deviation"].as_f64(), Some(0.25));
}

#[test]
fn analyze_with_grid_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CANONICAL);
    let out = dir.path().join("r.json");
    let (code, stdout, _) = run(&[
        "analyze",
        "--config",
        &cfg,
        "--grid",
        "9",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let r = json(&fs::read_to_string(out).unwrap());
    assert_eq!(r["tsirelson"]["points"], 9 * 9 * 9 * 9);
}

#[test]
fn malformed_config_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[angles]\na = [0.0, 45.0\n");
    let (code, _, err) = run(&["analyze", "--config", &cfg]);
    assert_eq!(code, 2);
    assert!(err.contains("line"), "{err}");
}

#[test]
fn invalid_config_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[settings]\nweights = [[0.5, 0.5], [0.5, 0.5]]\n[angles]\na = [0.0, 0.0]\nb = [0.0, 0.0]\n",
    );
    let (code, _, err) = run(&["analyze", "--config", &cfg]);
    assert_eq!(code, 3);
    assert!(err.contains("settings.weights"), "{err}");
}

#[test]
fn missing_files_are_io_errors() {
    let (code, _, _) = run(&["analyze", "--config", "/nonexistent/c.toml"]);
    assert_eq!(code, 4);
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CANONICAL);
    let (code, _, _) = run(&[
        "simulate",
        "--config",
        &cfg,
        "--n",
        "5",
        "--out",
        "/nonexistent/dir/e.csv",
    ]);
    assert_eq!(code, 4);
}

#[test]
fn simulate_writes_valid_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CANONICAL);
    let csv = dir.path().join("e.csv");
    let (code, out, _) = run(&[
        "simulate",
        "--config",
        &cfg,
        "--n",
        "10",
        "--seed",
        "3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("chacha20"), "{out}");
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("trial,a,b,A1,A2,B1,B2\n"));
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), 11);
    let records = read_records(text.as_bytes()).unwrap();
    assert_eq!(records.len(), 10);
}

#[test]
fn simulate_deterministic_space_repeats_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[settings]\nweights = [[0.0, 1.0], [0.0, 0.0]]\n[table]\nq11 = [1.0, 0.0, 0.0, 0.0]\nq12 = [0.0, 1.0, 0.0, 0.0]\nq21 = [1.0, 0.0, 0.0, 0.0]\nq22 = [1.0, 0.0, 0.0, 0.0]\n",
    );
    let csv = dir.path().join("e.csv");
    let (code, _, _) = run(&[
        "simulate",
        "--config",
        &cfg,
        "--n",
        "20",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&csv).unwrap();
    for line in text.lines().skip(1) {
        assert_eq!(line.split_once(',').unwrap().1, "1,2,1,0,0,-1");
    }
}

#[test]
fn simulate_ingest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CANONICAL);
    let csv = dir.path().join("e.csv");
    let csv = csv.to_str().unwrap();
    let (code, summary, _) = run(&[
        "simulate", "--config", &cfg, "--n", "50000", "--seed", "11", "--out", csv, "--shards", "3", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let summary = json(&summary);
    let (code, report, _) = run(&["ingest", csv, "--format", "json"]);
    assert_eq!(code, 0);
    let report = json(&report);
    assert_eq!(report["chsh"]["s_cond"], summary["s_cond_empirical"]);
    assert_eq!(report["chsh"]["s_abs"], summary["s_abs_empirical"]);
    for (i, row) in summary["q_empirical"].as_array().unwrap().iter().enumerate() {
        for (j, q) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(&report["chsh"]["correlations"]["conditional"][i][j], q);
        }
    }
    assert_eq!(report["undefined_cells"].as_array().unwrap().len(), 0);

    // the ingested tables are exactly the estimate from the written records
    let records = read_records(fs::File::open(csv).unwrap()).unwrap();
    let est = estimate(&records).unwrap();
    let table = est.table().unwrap();
    let q11: Vec<f64> = report["table"]["q11"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (a, b) in q11.iter().zip(table.blocks()[0][0].entries()) {
        assert_eq!(*a, bellspace::cli::report::fmt_num(b).parse::<f64>().unwrap());
    }
}

#[test]
fn ingest_rejects_rule_violation_with_row_number() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(
        dir.path(),
        "e.csv",
        "trial,a,b,A1,A2,B1,B2\n0,1,1,1,0,-1,0\n1,1,2,-1,1,0,1\n",
    );
    let (code, _, err) = run(&["ingest", &csv]);
    assert_eq!(code, 3);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("A2"), "{err}");
}

#[test]
fn ingest_malformed_and_empty_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "trial;a;b\n");
    assert_eq!(run(&["ingest", &bad]).0, 2);
    let empty = write(dir.path(), "empty.csv", "");
    let (code, _, err) = run(&["ingest", &empty]);
    assert_eq!(code, 3);
    assert!(err.contains("empty"), "{err}");
    let header_only = write(dir.path(), "h.csv", "trial,a,b,A1,A2,B1,B2\n");
    assert_eq!(run(&["ingest", &header_only]).0, 3);
}

#[test]
fn ingest_single_row_flags_fifteen_undefined_cells() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "e.csv", "trial,a,b,A1,A2,B1,B2\n0,1,2,1,0,0,-1\n");
    let (code, out, _) = run(&["ingest", &csv, "--format", "json"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["undefined_cells"].as_array().unwrap().len(), 15);
    assert_eq!(r["table"]["q11"], Value::Null);
    assert_eq!(r["table"]["q12"].as_array().unwrap().len(), 4);
    assert_eq!(r["fine"]["status"], "not_applicable");
    let (_, text, _) = run(&["ingest", &csv]);
    assert!(text.contains("undefined cells (15)"), "{text}");
}

#[test]
fn tsirelson_subcommand() {
    let (code, out, _) = run(&["tsirelson", "--grid", "17", "--format", "json"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["max_abs_chsh"].as_f64().unwrap(), 2.82842712475);
    assert_eq!(r["points"], 83521);
    assert_eq!(run(&["tsirelson", "--grid", "1"]).0, 3);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["analyze"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CANONICAL);
    let bin = env!("CARGO_BIN_EXE_bellspace");
    let ok = Command::new(bin).args(["analyze", "--config", &cfg]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("S_cond"));
    let bad = write(dir.path(), "bad.toml", "tolerance = [");
    let out = Command::new(bin).args(["analyze", "--config", &bad]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
