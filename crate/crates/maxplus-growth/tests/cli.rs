//! End-to-end tests of the `maxplus-growth` binary: output formats,
//! exit codes, and determinism contracts.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxplus-growth"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn without_timestamp(s: &str) -> String {
    s.lines()
        .filter(|l| !l.contains("timestamp"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn lambda_plain_output() {
    let out = run(&["lambda", "--mu", "1", "--nu", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1.250000000000\n");

    let out = run(&["lambda", "--mu", "1", "--nu", "2"]);
    assert_eq!(stdout(&out), "1.033333333333\n");
}

#[test]
fn lambda_rejects_nonpositive_rate() {
    let out = run(&["lambda", "--mu", "0", "--nu", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mu must be > 0"), "{}", stderr(&out));

    let out = run(&["lambda", "--mu", "1", "--nu", "-3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nu must be > 0"));
}

#[test]
fn lambda_json_output() {
    let out = run(&["lambda", "--mu", "1", "--nu", "2", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["lambda"].as_f64().unwrap() - 31.0 / 30.0).abs() < 1e-12);
    let meta = &v["meta"];
    assert_eq!(meta["command"], "lambda");
    assert_eq!(meta["mu"], 1.0);
    assert_eq!(meta["nu"], 2.0);
    assert_eq!(meta["schema"], "maxplus-growth.lambda.v1");
    assert!(meta["timestamp"].is_string());
    assert!(meta["tool_version"].is_string());
}

#[test]
fn psi_limit_curve() {
    let out = run(&[
        "psi", "--mu", "1", "--nu", "1", "--limit", "--t-min", "-5", "--t-max", "5", "--step",
        "0.5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\nt,psi\n"));
    assert!(
        text.contains("\n0.000000,0.500000000000\n"),
        "missing t=0 row:\n{text}"
    );
    // CSV values parse back to exactly what was printed.
    for line in text.lines().skip_while(|l| !l.starts_with("t,")).skip(1) {
        let (t, v) = line.split_once(',').unwrap();
        assert_eq!(format!("{:.6}", t.parse::<f64>().unwrap()), t);
        assert_eq!(format!("{:.12}", v.parse::<f64>().unwrap()), v);
    }
}

#[test]
fn psi_step_two_header_echoes_coefficients() {
    let out = run(&[
        "psi", "--mu", "1", "--nu", "2", "--k", "2", "--t-min", "-5", "--t-max", "5", "--step",
        "0.5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("c1=0.740740740741"),
        "header missing coefficients:\n{text}"
    );
}

#[test]
fn psi_is_step_independent_at_equal_rates() {
    let args = |k: &str| {
        vec![
            "psi".to_string(),
            "--mu".into(),
            "1".into(),
            "--nu".into(),
            "1".into(),
            "--k".into(),
            k.into(),
            "--t-min".into(),
            "-5".into(),
            "--t-max".into(),
            "5".into(),
            "--step".into(),
            "0.5".into(),
        ]
    };
    let one = bin().args(args("1")).output().unwrap();
    let seven = bin().args(args("7")).output().unwrap();
    let strip_k = |s: &str| {
        without_timestamp(s)
            .lines()
            .filter(|l| !l.starts_with("# k="))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip_k(&stdout(&one)), strip_k(&stdout(&seven)));
}

#[test]
fn psi_requires_k_or_limit() {
    let out = run(&["psi", "--mu", "1", "--nu", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--k") && stderr(&out).contains("--limit"));
}

#[test]
fn psi_writes_to_file() {
    let dir = std::env::temp_dir().join("maxplus-growth-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("psi.csv");
    let out = run(&[
        "psi",
        "--mu",
        "1",
        "--nu",
        "2",
        "--limit",
        "--t-min",
        "-4",
        "--t-max",
        "4",
        "--step",
        "0.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("t,psi"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn phi_curve_columns() {
    let out = run(&[
        "phi", "--mu", "1", "--nu", "1", "--t-max", "5", "--step", "0.25",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\nt,phi_cdf,phi_pdf\n"));
    assert!(text.contains("\n0.000000,0.000000000000,0.500000000000\n"));
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("5.000000,"));
}

#[test]
fn simulate_json_shape_and_determinism() {
    let args = [
        "simulate", "--mu", "1", "--nu", "1", "--steps", "100", "--trials", "40", "--seed", "42",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(v["n"], 40);
    assert!(v["lambda_mean"].is_f64() && v["std_error"].is_f64());
    assert!(v.get("ks").is_none() || v["ks"].is_null());
    let meta = &v["meta"];
    assert_eq!(meta["command"], "simulate");
    assert_eq!(meta["steps"], 100);
    assert_eq!(meta["trials"], 40);
    assert_eq!(meta["seed"], 42);
    assert_eq!(meta["schema"], "maxplus-growth.simulate.v1");
    assert!(meta["generator"].as_str().unwrap().contains("chacha12"));

    let second = run(&args);
    assert_eq!(
        without_timestamp(&stdout(&first)),
        without_timestamp(&stdout(&second))
    );
}

#[test]
fn simulate_with_ks_block() {
    let out = run(&[
        "simulate",
        "--mu",
        "1",
        "--nu",
        "2",
        "--steps",
        "50",
        "--trials",
        "2000",
        "--seed",
        "7",
        "--record-y-at",
        "50",
        "--ks-against",
        "psi",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ks = &v["ks"];
    assert_eq!(ks["against"], "psi");
    assert_eq!(ks["at_step"], 50);
    let d = ks["d"].as_f64().unwrap();
    let threshold = ks["threshold_95"].as_f64().unwrap();
    assert!((threshold - 1.358 / 2000f64.sqrt()).abs() < 1e-12);
    assert!(d < 1.5 * threshold, "D = {d}");
}

#[test]
fn simulate_ks_without_recording_is_exit_3() {
    let out = run(&[
        "simulate",
        "--mu",
        "1",
        "--nu",
        "1",
        "--steps",
        "10",
        "--trials",
        "5",
        "--seed",
        "1",
        "--ks-against",
        "psi",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("--record-y-at"));

    let out = run(&[
        "simulate",
        "--mu",
        "1",
        "--nu",
        "1",
        "--steps",
        "10",
        "--trials",
        "5",
        "--seed",
        "1",
        "--ks-against",
        "phi",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("--record-z"));
}

#[test]
fn verify_passes_for_valid_rates() {
    for (mu, nu) in [("1", "1"), ("1", "2")] {
        let out = run(&["verify", "--mu", mu, "--nu", nu]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        let text = stdout(&out);
        assert_eq!(text.matches("PASS").count(), 6, "{text}");
        assert_eq!(text.matches("FAIL").count(), 0);
    }
}

#[test]
fn verify_rejects_invalid_rates() {
    let out = run(&["verify", "--mu", "-1", "--nu", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_fails_with_impossible_tolerance() {
    let out = run(&["verify", "--mu", "1", "--nu", "2", "--tol-grid", "1e-14"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn invalid_threads_env_is_exit_2() {
    let out = bin()
        .args([
            "simulate", "--mu", "1", "--nu", "1", "--steps", "10", "--trials", "5", "--seed", "1",
        ])
        .env("MAXPLUS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("MAXPLUS_THREADS"));
}
