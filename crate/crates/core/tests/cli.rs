use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delayed-pa"))
}

fn stdout(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn theory_prints_anchors() {
    let (code, text) = stdout(&["theory", "--kernel", "affine", "--alpha", "0"]);
    assert_eq!(code, 0);
    assert!(text.lines().any(|l| l == "lambda_star=2"), "{text}");
    assert!(text.lines().any(|l| l == "p_1=0.666667"), "{text}");
    assert!(text.lines().any(|l| l == "sigma1_sq=0.111111"), "{text}");
}

#[test]
fn theory_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = stdout(&[
        "theory",
        "--kernel",
        "uniform",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for f in [
        "config_echo.cfg",
        "theory_degree.csv",
        "theory_fringe.csv",
        "constants.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("constants.json")).unwrap())
            .unwrap();
    assert!((json["lambda_star"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn check_delay_verdict() {
    let (code, text) = stdout(&[
        "check-delay",
        "--delay",
        "invpow:2",
        "--beta",
        "0.5",
        "--ngrid",
        "1e2..1e5",
    ]);
    assert_eq!(code, 0);
    assert!(text.contains("verdict=satisfied"), "{text}");
    assert_eq!(text.lines().count(), 1 + 4 + 1);
}

#[test]
fn simulate_writes_outputs_and_reruns_identically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |dir: &str| {
        vec![
            "simulate".to_string(),
            "--n".into(),
            "20000".into(),
            "--replicates".into(),
            "4".into(),
            "--delay".into(),
            "uniform".into(),
            "--set".into(),
            "seed=5".into(),
            "--out".into(),
            dir.into(),
        ]
    };
    let out_a = bin()
        .args(args(a.path().to_str().unwrap()))
        .output()
        .unwrap();
    assert_eq!(
        out_a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out_a.stdout)
    );
    let echo = a.path().join("config_echo.cfg");
    let out_b = bin()
        .args([
            "simulate",
            "--config",
            echo.to_str().unwrap(),
            "--out",
            b.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out_b.status.code(), Some(0));
    for f in [
        "config_echo.cfg",
        "summary.json",
        "degree_hist.csv",
        "fringe.csv",
        "extended_fringe.csv",
    ] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn tolerance_failure_exits_one() {
    let (code, text) = stdout(&["simulate", "--n", "2"]);
    assert_eq!(code, 1);
    assert!(text.contains("FAIL degree_tv"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(
        stdout(&["simulate", "--config", "/definitely/missing.cfg"]).0,
        2
    );
    assert_eq!(stdout(&["simulate", "--set", "nonsense"]).0, 2);
    assert_eq!(stdout(&["simulate", "--set", "bogus=1"]).0, 2);
    assert_eq!(stdout(&["simulate", "--preset", "fig9"]).0, 2);
    assert_eq!(stdout(&["frobnicate"]).0, 2);
    assert_eq!(stdout(&["simulate", "--n", "ten"]).0, 2);
    assert_eq!(
        stdout(&["rootdeg", "--kernel", "uniform", "--n", "100"]).0,
        2
    );
}

#[test]
fn rootdeg_and_clt_run() {
    let (code, text) = stdout(&[
        "rootdeg",
        "--n",
        "10000",
        "--replicates",
        "10",
        "--delay",
        "uniform",
        "--grid",
        "1e2,1e3,1e4",
    ]);
    assert!(code == 0 || code == 1);
    assert_eq!(text.lines().filter(|l| l.starts_with("root n=")).count(), 3);
    let (code, text) = stdout(&["clt", "--n", "2000", "--replicates", "50"]);
    assert!(code == 0 || code == 1);
    assert!(text.contains("clt_variance="));
}
