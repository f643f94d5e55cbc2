use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_randsum"));
    c.env_remove("RANDSUM_THREADS");
    c
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../golden").join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn rate_table_prints_geometric_rate() {
    let out = run(bin().args(["rate-table", "--theory", "geometric-mdp", "--t", "0.5,1,2"]));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (t, r) = l.split_once(',').unwrap();
            (t.parse().unwrap(), r.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 3);
    for (t, r) in rows {
        assert!((r - std::f64::consts::SQRT_2 * t).abs() < 1e-8);
    }
}

#[test]
fn missing_config_exits_2_and_names_path() {
    let out = run(bin().args(["simulate", "--config", "missing.json"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}

#[test]
fn invalid_config_and_unknown_flags_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"index": "poisson", "lambda": 100, "summand": "gaussian", "alpha": 0.7}"#).unwrap();
    let out = run(bin().args(["verify", "--config"]).arg(&cfg).arg("--output-dir").arg(dir.path()));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha must lie in [0, 1/2]"));
    let out = run(bin().args(["rate-table", "--theory", "quadratic", "--t", "1", "--bogus"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for (i, threads) in ["1", "1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{i}"));
        let out = run(bin()
            .args(["verify", "--config"])
            .arg(golden("poisson_ldp.json"))
            .args(["--seed", "7", "--threads", threads, "--output-dir"])
            .arg(&out_dir));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        csvs.push(std::fs::read(out_dir.join("report.csv")).unwrap());
        assert!(out_dir.join("report.json").exists());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);

    let other = dir.path().join("seed8");
    let out = run(bin()
        .args(["verify", "--config"])
        .arg(golden("poisson_ldp.json"))
        .args(["--seed", "8", "--output-dir"])
        .arg(&other));
    assert!(out.status.success());
    assert_ne!(std::fs::read(other.join("report.csv")).unwrap(), csvs[0]);
}

#[test]
fn threads_env_var_does_not_change_output() {
    let a = run(bin().args(["limit-law", "--config"]).arg(golden("laplace_limit.json")));
    let b = run(bin().env("RANDSUM_THREADS", "2").args(["limit-law", "--config"]).arg(golden("laplace_limit.json")));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["reference"], "laplace");
    assert!(v["ks"].as_f64().unwrap() <= 0.01);
}

#[test]
fn cumulants_reports_conditions_and_honours_seed() {
    let args = ["cumulants", "--model", "poisson:100+gaussian", "--max-order", "6", "--samples", "20000"];
    let a = run(bin().args(args).args(["--seed", "3", "--threads", "1"]));
    let b = run(bin().args(args).args(["--seed", "3", "--threads", "2"]));
    let c = run(bin().args(args).args(["--seed", "4"]));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!((v["cumulants"]["4"].as_f64().unwrap() - 0.03).abs() < 1e-12);
    assert_eq!(v["statulevicius"]["pass"], true);

    let out = run(bin().args(["cumulants", "--model", "geometric:0.1", "--max-order", "6"]));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["index_cumulant"]["fitted_constant"].as_f64().unwrap() - 6.56381428799006).abs() < 1e-9);

    let out = run(bin().args(["cumulants", "--model", "cauchy"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rates.csv");
    let out = run(bin().args(["simulate", "--config"]).arg(golden("poisson_ldp.json")).arg("--output").arg(&csv));
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 13);
    assert!(dir.path().join("rates.json").exists());
}
