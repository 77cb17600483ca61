use std::process::{Command, Output};

use serde_json::Value;

fn wsupport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsupport")).args(args).output().expect("spawn wsupport")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn roots_a2() {
    let o = wsupport(&["roots", "A", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["roots"].as_array().unwrap().len(), 6);
    assert_eq!(v["group_order"], 6);
}

#[test]
fn roots_with_theta() {
    let v = json(&wsupport(&["roots", "A", "2", "--theta", "1"]));
    let mut ineq: Vec<String> =
        v["theta"]["inequalities"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
    ineq.sort();
    assert_eq!(ineq, ["e1-e3", "e2-e3"]);
    assert_eq!(v["theta"]["agreement"], 1.0);
}

#[test]
fn roots_group_too_large() {
    assert_eq!(wsupport(&["roots", "I2", "17", "--cap", "10"]).status.code(), Some(1));
}

#[test]
fn roots_bad_family_is_usage() {
    assert_eq!(wsupport(&["roots", "Q", "2"]).status.code(), Some(2));
}

#[test]
fn symbol_values() {
    let v = json(&wsupport(&["symbol", "jacobi1d", "--reg", "--x", "1", "--lam", "2"]));
    // σ(sinh²x · L)(1, 2) = 4 sinh²(1)
    assert!((v["symbol"].as_f64().unwrap() - 4.0 * 1f64.sinh().powi(2)).abs() < 1e-9);
    assert_eq!(wsupport(&["symbol", "jacobi1d", "--x", "0", "--lam", "1"]).status.code(), Some(1));
    let neg = json(&wsupport(&["symbol", "xddx", "--x", "-2", "--lam", "-1"]));
    assert_eq!(neg["symbol"], 2.0);
}

#[test]
fn symbol_factorization() {
    let o = wsupport(&["symbol", "besselL0", "A2", "--reg", "--factor"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["factorization"]["passed"], true);
    assert!(v["factorization"]["min_abs_p"].as_f64().unwrap() > 0.0);
}

#[test]
fn ops_list() {
    let v = json(&wsupport(&["ops", "list"]));
    let names: Vec<&str> = v["operators"].as_array().unwrap().iter().map(|o| o["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"calogero") && names.contains(&"jacobi1d"));
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wsupport(&["verify", "rank1-abc", "--out-dir", out, "--csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&std::fs::read(dir.path().join("rank1-abc.json")).unwrap()).unwrap();
    assert_eq!(r["reports"].as_array().unwrap().len(), 3);
    assert_eq!(r["passed"], true);
    assert!(dir.path().join("rank1-abc_a_df.csv").exists());
}

#[test]
fn verify_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let o = wsupport(&["verify", "counterexample", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let r: Value = serde_json::from_slice(&std::fs::read(dir.path().join("counterexample.json")).unwrap()).unwrap();
    let hull = &r["counterexample"]["du"]["hull"];
    assert!(hull[0].as_f64().unwrap() >= 0.95 && hull[1].as_f64().unwrap() <= 1.05);
}

#[test]
fn verify_config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# coarse run\npoints_1d = 801\neps = 0.1\n").unwrap();
    let out = dir.path().join("out");
    let o = wsupport(&[
        "verify",
        "rank1-abc",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "seed=5",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&std::fs::read(out.join("rank1-abc.json")).unwrap()).unwrap();
    assert_eq!(r["config"]["points_1d"], 801);
    assert_eq!(r["config"]["seed"], 5);

    std::fs::write(&cfg, "points_1d = 801\nepsilon = 0.1\n").unwrap();
    let bad = wsupport(&["verify", "rank1-abc", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_grid_and_h() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wsupport(&["verify", "calogero-A2", "--grid", "301", "--h", "auto", "--out-dir", out]);
    assert!(o.status.success());
    let o = wsupport(&["verify", "rank1-abc", "--h", "0.01", "--out-dir", out]);
    assert!(o.status.success());
    let r: Value = serde_json::from_slice(&std::fs::read(dir.path().join("rank1-abc.json")).unwrap()).unwrap();
    assert_eq!(r["config"]["points_1d"], 1001);
    assert_eq!(wsupport(&["verify", "rank1-abc", "--h", "fine", "--out-dir", out]).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(wsupport(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(wsupport(&["verify", "rank1-abc", "--bogus"]).status.code(), Some(2));
    assert_eq!(wsupport(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    for args in [
        vec!["--help"],
        vec!["roots", "--help"],
        vec!["symbol", "--help"],
        vec!["verify", "--help"],
        vec!["ops", "--help"],
        vec!["ops", "list", "--help"],
    ] {
        assert_eq!(wsupport(&args).status.code(), Some(0), "{args:?}");
    }
}
