use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use frechet_sdr::metrics::MetricObject;
use frechet_sdr::simgen::{self, ModelId, ModelSpec};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frechet-sdr"))
        .args(args)
        .output()
        .expect("spawn frechet-sdr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a Model III dataset as predictor and sample CSVs.
fn model_three_files(dir: &Path, n: usize) -> (String, String) {
    let data = simgen::generate(&ModelSpec::new(ModelId::III, n, 4).unwrap(), 8).unwrap();
    let mut x = String::from("x1,x2,x3,x4\n");
    for i in 0..n {
        let row: Vec<String> = data.x.row(i).iter().map(|v| v.to_string()).collect();
        x.push_str(&row.join(","));
        x.push('\n');
    }
    let mut s = String::new();
    for obj in &data.responses {
        let MetricObject::Distribution(d) = obj else {
            unreachable!()
        };
        let row: Vec<String> = d.values().iter().map(|v| v.to_string()).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    let (xp, sp) = (dir.join("x.csv"), dir.join("samples.csv"));
    fs::write(&xp, x).unwrap();
    fs::write(&sp, s).unwrap();
    (path(&xp).to_owned(), path(&sp).to_owned())
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["simulate", "--dim"])), 1);
    assert_eq!(code(&run(&["simulate", "--model", "IV", "--metric", "l1"])), 1);
}

#[test]
fn estimate_with_bootstrap() {
    let dir = tempfile::tempdir().unwrap();
    let (x, s) = model_three_files(dir.path(), 60);
    let out = dir.path().join("est");
    let args = [
        "estimate",
        "--predictors",
        &x,
        "--responses",
        &s,
        "--metric",
        "w2",
        "--estimator",
        "sa-SIR",
        "--projections",
        "100",
        "--bootstrap",
        "10",
        "--out",
        path(&out),
    ];
    let res = run(&args);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let basis = fs::read_to_string(out.join("basis.csv")).unwrap();
    assert_eq!(basis.lines().count(), 1 + 4);
    assert_eq!(basis.lines().next(), Some("b1"));
    let boot = fs::read_to_string(out.join("bootstrap.csv")).unwrap();
    assert_eq!(boot.lines().next(), Some("coefficient,estimate,se,lower,upper"));
    assert_eq!(boot.lines().count(), 1 + 4);

    let two = run(&[
        "estimate",
        "--predictors",
        &x,
        "--responses",
        &s,
        "--dim",
        "2",
        "--bootstrap",
        "10",
    ]);
    assert_eq!(code(&two), 1);
}

#[test]
fn distances_then_estimate_from_the_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let (x, s) = model_three_files(dir.path(), 40);
    let dpath = dir.path().join("d.csv");
    let res = run(&[
        "distances",
        "--responses",
        &s,
        "--metric",
        "w1",
        "--out",
        path(&dpath),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&dpath).unwrap();
    assert_eq!(text.lines().count(), 40);
    assert!(text.lines().all(|l| l.split(',').count() == 40));

    let res = run(&[
        "estimate",
        "--predictors",
        &x,
        "--responses",
        path(&dpath),
        "--kind",
        "distances",
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(String::from_utf8(res.stdout).unwrap().lines().count(), 1 + 4);
}

#[test]
fn predict_reports_both_predictors() {
    let dir = tempfile::tempdir().unwrap();
    let (x, s) = model_three_files(dir.path(), 30);
    let res = run(&[
        "predict",
        "--predictors",
        &x,
        "--responses",
        &s,
        "--projections",
        "50",
        "--grid",
        "20",
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let text = String::from_utf8(res.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "predictor,delta");
    assert!(lines[1].starts_with("sa-OLS,"));
    assert!(lines[2].starts_with("barycenter,"));

    let wrong_kind = run(&["predict", "--predictors", &x, "--responses", &s, "--kind", "spd"]);
    assert_eq!(code(&wrong_kind), 1);
}

#[test]
fn simulate_repeats_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}"));
        let res = run(&[
            "--threads",
            threads,
            "simulate",
            "--model",
            "VI,IX",
            "--size",
            "30,4",
            "--replicates",
            "1",
            "--seed",
            "5",
            "--out",
            path(&out),
        ]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
        outputs.push(fs::read(out.join("summary.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
