use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn out_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cclt-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

fn cclt(args: &[&str], out: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cclt"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn distance_csv_is_reproducible_across_workers() {
    let args = ["distance", "--model", "pattern01", "--n", "200", "--samples", "4000", "--seed", "9"];
    let (a, b) = (out_dir("da"), out_dir("db"));
    ok(&cclt(&[&args[..], &["--workers", "1"]].concat(), &a));
    ok(&cclt(&[&args[..], &["--workers", "3"]].concat(), &b));
    let (ca, cb) = (
        fs::read(a.join("distance.csv")).unwrap(),
        fs::read(b.join("distance.csv")).unwrap(),
    );
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("model,n,k,samples,distance,stderr,bound_total,seed"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "pattern01");
    assert_eq!(row[3], "4000");
    assert_eq!(row[7], "9");
    let manifest = fs::read_to_string(a.join("distance.manifest.txt")).unwrap();
    for key in ["seed=9", "cclt_version=", "wall_seconds=", "config.samples=4000", "status=ok"] {
        assert!(manifest.contains(key), "{key} missing from manifest");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = out_dir("cfg");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "# small run\nmodel=pattern01\nn=100\nsamples=2000\nseed=3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    ok(&cclt(&["distance", "--config", cfg, "--seed", "4"], &dir));
    let manifest = fs::read_to_string(dir.join("distance.manifest.txt")).unwrap();
    assert!(manifest.contains("config.n=100"));
    assert!(manifest.contains("\nseed=4\n"));
    let csv = fs::read_to_string(dir.join("distance.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",4"));
}

#[test]
fn oracle_check_reports_zero_error() {
    let dir = out_dir("oracle");
    let s = ok(&cclt(&["oracle-check", "--model", "wedge-edge", "--n", "4"], &dir));
    assert_eq!(s.lines().filter(|l| l.starts_with("wedge-edge,4,")).count(), 7);
    assert!(s.contains("max_abs_error: 0e0"), "{s}");
}

#[test]
fn bound_report_is_json_with_terms() {
    let dir = out_dir("bound");
    let s = ok(&cclt(
        &["bound", "--model", "pattern01", "--theorem", "t23", "--n", "64", "--k", "0", "--samples", "3000"],
        &dir,
    ));
    let json: serde_json::Value = serde_json::from_str(s.split("\ntotal:").next().unwrap()).unwrap();
    assert_eq!(json["theorem"], "T2.3");
    assert!(json["terms"]["E_hat_k"].as_f64().unwrap() > 0.0);
    assert!(json["total"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_and_llt_run() {
    let dir = out_dir("verify");
    let s = ok(&cclt(&["verify-assumptions", "--model", "pattern01", "--n", "10", "--p", "0.3"], &dir));
    assert!(s.contains("drift_within_envelope: true"), "{s}");
    let s = ok(&cclt(&["llt", "--model", "pattern01", "--n", "100", "--k", "0"], &dir));
    assert!(s.contains("implied_constant"), "{s}");
    let s = ok(&cclt(&["decompose", "--n", "6", "--p", "1/3", "--pattern", "k4"], &dir));
    assert!(s.contains("mean_residual_exact: 0"), "{s}");
}

#[test]
fn errors_name_the_limit() {
    let dir = out_dir("err");
    let o = cclt(&["verify-assumptions", "--model", "pattern01", "--n", "40"], &dir);
    assert!(!o.status.success());
    let e = String::from_utf8_lossy(&o.stderr);
    assert!(e.contains("sequence length") && e.contains("limit"), "{e}");
    let o = cclt(&["distance", "--model", "nope", "--n", "4"], &dir);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown model"));
    let manifest = fs::read_to_string(dir.join("distance.manifest.txt")).unwrap();
    assert!(manifest.contains("status=error"));
}
