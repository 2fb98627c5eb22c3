use std::path::{Path, PathBuf};

use petition_pulse_cli::run;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn data_cmd(cmd: &str, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec![
        "petition-pulse".to_string(),
        cmd.into(),
        "--petitions".into(),
        fixture("petitions.csv"),
        "--signatures".into(),
        fixture("signatures.csv"),
        "--centroids".into(),
        fixture("centroids.csv"),
        "--out".into(),
        out.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    run(args)
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(["petition-pulse"]), 1);
    assert_eq!(run(["petition-pulse", "frobnicate"]), 1);
    assert_eq!(run(["petition-pulse", "simulate", "--bogus"]), 1);
    assert_eq!(run(["petition-pulse", "metrics", "--petitions", "x.csv"]), 1);
    assert_eq!(run(["petition-pulse", "--help"]), 0);
}

#[test]
fn missing_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let code = run([
        "petition-pulse",
        "ingest",
        "--petitions",
        "/nonexistent/petitions.csv",
        "--signatures",
        "/nonexistent/signatures.csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn bad_cutoff_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(data_cmd("metrics", dir.path(), &["--cutoff", "soon"]), 1);
}

#[test]
fn metrics_on_tiny_fixture() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(data_cmd("metrics", dir.path(), &[]), 0);
    let rows = read_csv(&dir.path().join("metrics.csv"));
    // p4 has no signatures and is excluded.
    let ids: Vec<&str> = rows.iter().map(|r| &r[0]).collect();
    assert_eq!(ids, ["p1", "p2", "p3"]);

    let col = |r: &csv::StringRecord, i: usize| r[i].to_string();
    // p1: single spike of 10.
    assert_eq!(col(&rows[0], 3), "10");
    assert_eq!(col(&rows[0], 4).parse::<f64>().unwrap(), 1.0);
    assert_eq!(col(&rows[0], 14), "true");
    // p2: [2,5,1,4,4,3] -> E_Tot = E_GPO = 3/19, peak day 2, one local peak, FDSD.
    let e: f64 = col(&rows[1], 4).parse().unwrap();
    assert!((e - 3.0 / 19.0).abs() < 1e-10);
    assert_eq!((col(&rows[1], 7), col(&rows[1], 8), col(&rows[1], 9)), ("true".into(), "2".into(), "1".into()));
    assert_eq!(col(&rows[1], 2), "true");
    // p3: [1,3,0,0,2] -> E_Tot 4/6, E_GPO 2/6; 30000 before the cutoff is a success.
    let e: f64 = col(&rows[2], 4).parse().unwrap();
    let g: f64 = col(&rows[2], 6).parse().unwrap();
    assert!((e - 4.0 / 6.0).abs() < 1e-10 && (g - 2.0 / 6.0).abs() < 1e-10);
    assert_eq!(col(&rows[2], 2), "true");

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metrics.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["command"], "metrics");
    assert_eq!(meta["config"]["regime_cutoff"], 1_358_208_000);
    assert_eq!(meta["config"]["horizon"], 60);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn cutoff_changes_success() {
    let dir = tempfile::tempdir().unwrap();
    // Everything created before 2000 is judged on the 25,000 rule; nothing is.
    assert_eq!(data_cmd("metrics", dir.path(), &["--cutoff", "2000-01-01"]), 0);
    let rows = read_csv(&dir.path().join("metrics.csv"));
    assert_eq!(&rows[2][2], "false");
}

#[test]
fn ingest_reports_orphans() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(data_cmd("ingest", dir.path(), &[]), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(report["summary"]["orphan_signatures"], 1);
    assert_eq!(report["summary"]["petitions"], 4);
    assert_eq!(report["successful_petitions"], 2);
    assert_eq!(report["centroids"], 3);
}

#[test]
fn compare_and_curves_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(data_cmd("compare", dir.path(), &[]), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("compare.json")).unwrap()).unwrap();
    // p2 and p3 are successful with FDSD, p1 is unsuccessful without.
    assert_eq!(report["fdsd_table"], serde_json::json!([[2, 0], [0, 1]]));

    assert_eq!(data_cmd("curves", dir.path(), &[]), 0);
    let curves = read_csv(&dir.path().join("curves.csv"));
    assert_eq!(curves.len(), 3 * 60);
    let day1_all = &curves[0];
    assert_eq!((&day1_all[0], &day1_all[1], &day1_all[3]), ("all", "1", "13"));
    let profile = read_csv(&dir.path().join("peak_profile.csv"));
    let flat: Vec<Vec<String>> = profile.iter().map(|r| r.iter().map(String::from).collect()).collect();
    assert_eq!(flat[0][0], "1");
    assert_eq!(flat[1][0], "2");
    assert_eq!(flat[1][2], "2");
}

#[test]
fn regress_needs_more_rows_than_columns() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(data_cmd("regress", dir.path(), &[]), 1);
}

#[test]
fn geo_same_zipcode_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(data_cmd("geo", dir.path(), &[]), 0);
    let rows = read_csv(&dir.path().join("geo.csv"));
    assert_eq!(&rows[0][0], "p1");
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.0);
    assert_eq!(&rows[0][3], "9");
    // p3 has no Zipcodes at all.
    assert_eq!(&rows[2][2], "");
    assert_eq!(&rows[2][4], "5");
}

#[test]
fn simulate_export_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(["petition-pulse", "simulate", "--n", "7", "--horizon", "20", "--seed", "1", "--out", out]), 0);
    let mut r = csv::Reader::from_path(dir.path().join("cohort.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    assert_eq!(&h[0], "index");
    assert_eq!(&h[h.len() - 1], "d20");
    let rows: Vec<_> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 7);
    for row in &rows {
        let days: u64 = (5..h.len()).map(|i| row[i].parse::<u64>().unwrap()).sum();
        assert_eq!(days.to_string(), row[3]);
    }
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cohort.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["master_seed"], 1);
    assert_eq!(meta["config"]["simulation"]["horizon"], 20);
}

#[test]
fn replicate_gate_failure_exits_2() {
    // Per-user binomial noise flips the num_local_peaks sign.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(["petition-pulse", "replicate", "--dynamics", "binomial", "--out", out]), 2);
    assert!(dir.path().join("replicate.txt").exists());
}

#[test]
fn invalid_model_override_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(["petition-pulse", "simulate", "--r0-min", "3", "--out", out]), 1);
    assert_eq!(run(["petition-pulse", "simulate", "--dynamics", "poisson", "--out", out]), 1);
}
