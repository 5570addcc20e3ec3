use std::path::Path;
use std::process::{Command, Output};

fn pdx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdx"))
        .args(args)
        .env_remove("PDX_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn predict_at_one_million() {
    let o = pdx(&["predict", "--rho", "1e6", "--dim", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for line in ["I = 14", "J = 13", "l_d = 2", "asymptotic = 2.63"] {
        assert!(s.contains(line), "missing {line:?} in\n{s}");
    }
    let o = pdx(&[
        "predict",
        "--rho",
        "1e10",
        "--dim",
        "3",
        "--model",
        "parametric:2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!pdx(&["predict", "--rho", "1e6", "--dim", "3"])
        .status
        .success());
}

#[test]
fn pmf_table_ends_at_kmax() {
    let o = pdx(&["pmf", "--kmax", "16"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let last = s.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    assert_eq!(cols[0], "16");
    let q: f64 = cols[1].parse().unwrap();
    assert!((q / 7.6e-8 - 1.0).abs() < 0.03);
    assert_eq!(s.lines().next(), Some("k,q,G"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        pdx(&["predict", "--rho", "1e6", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pdx(&["simulate", "--rho", "x", "--trials", "1", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pdx(&["predict", "--rho", "1e6", "--model", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(pdx(&[]).status.code(), Some(2));
}

#[test]
fn simulate_is_reproducible_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_pdx"))
            .args([
                "simulate",
                "--rho",
                "2000",
                "--trials",
                "12",
                "--seed",
                "9",
                "--diag",
                "clusters,e_rho",
            ])
            .arg("--out")
            .arg(&out)
            .env("PDX_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "4");
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["trials"].as_array().unwrap().len(), 12);
    assert!(v["trials"][0]["e_rho"].is_boolean());
    assert!(v["config"].get("workers").is_none());
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = pdx(&[
        "simulate",
        "--rho",
        "500",
        "--trials",
        "5",
        "--seed",
        "3",
        "--workers",
        "2",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("degree,count,probability\n"));
}

fn one_trial_file(dir: &Path) -> std::path::PathBuf {
    let out = dir.join("one.json");
    let o = pdx(&[
        "simulate",
        "--rho",
        "300",
        "--trials",
        "1",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    out
}

#[test]
fn hist_of_one_trial_is_a_full_bar() {
    let dir = tempfile::tempdir().unwrap();
    let input = one_trial_file(dir.path());
    let svg = dir.path().join("one.svg");
    let o = pdx(&[
        "hist",
        "--in",
        input.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let s = std::fs::read_to_string(svg).unwrap();
    assert_eq!(s.matches("fill=\"#4a72b0\"").count(), 1);
    assert!(s.contains(r#"y="20.00" width="440.00" height="320.00""#));
    let missing = dir.path().join("missing.json");
    let o = pdx(&["hist", "--in", missing.to_str().unwrap(), "--svg", "x.svg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn palm_histogram() {
    let o = pdx(&[
        "palm",
        "--trials",
        "300",
        "--rho",
        "16",
        "--seed",
        "2",
        "--workers",
        "1",
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().next(), Some("degree,count,probability"));
    let total: u64 = s
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert!(total <= 300 && total > 290);
}

#[test]
fn union_suite_passes() {
    let o = pdx(&["verify", "--suite", "union", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.lines().all(|l| l.starts_with("PASS ")));
}
