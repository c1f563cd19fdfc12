use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn yawtune(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yawtune"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn yawtune")
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

#[test]
fn simulate_writes_trace_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out = yawtune(
        &["simulate", "--kp", "260", "--ki", "70", "--out", "ga.csv"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&out.stdout);
    let overshoot = report["metrics"]["percent_overshoot"].as_f64().unwrap();
    assert!((overshoot - 18.0).abs() < 4.0);
    assert!(report["itae"].as_f64().unwrap() > 0.0);
    let csv = fs::read_to_string(dir.path().join("ga.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,r,e,u,y"));
    assert_eq!(lines.count(), 15_001);
}

#[test]
fn simulate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let zero = yawtune(&["simulate", "--kp", "0", "--ki", "0"], dir.path());
    assert_eq!(zero.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&zero.stderr).contains("zero controller"));

    assert_eq!(
        yawtune(&["simulate", "--kp", "abc", "--ki", "1"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        yawtune(&["simulate", "--ki", "1"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        yawtune(&["simulate", "--kp", "-1", "--ki", "1"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        yawtune(
            &[
                "simulate",
                "--kp",
                "1",
                "--ki",
                "1",
                "--dt",
                "0.3",
                "--t-final",
                "10"
            ],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );

    fs::write(
        dir.path().join("unstable.json"),
        r#"{"num": [1.0], "den": [1.0, -5.0]}"#,
    )
    .unwrap();
    let blowup = yawtune(
        &[
            "simulate",
            "--kp",
            "1",
            "--ki",
            "0",
            "--plant",
            "unstable.json",
        ],
        dir.path(),
    );
    assert_eq!(blowup.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&blowup.stderr).contains("t = "));
}

#[test]
fn simulate_steady_state_at_20s() {
    let dir = tempfile::tempdir().unwrap();
    let out = yawtune(
        &["simulate", "--kp", "296", "--ki", "81", "--t-final", "20"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let ss = json(&out.stdout)["metrics"]["steady_state_value"]
        .as_f64()
        .unwrap();
    assert!((ss - 1.0).abs() < 0.005, "{ss}");
}

const FAST_SA: &str = r#"{"sa": {"moves_per_temperature": 4}}"#;

#[test]
fn tune_writes_scatter_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("fast.json"), FAST_SA).unwrap();
    let out = yawtune(
        &[
            "tune",
            "--method",
            "sa",
            "--runs",
            "10",
            "--seed",
            "1",
            "--config",
            "fast.json",
            "--out",
            "sa.json",
            "--scatter",
            "sa.csv",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let scatter = fs::read_to_string(dir.path().join("sa.csv")).unwrap();
    let rows: Vec<&str> = scatter.lines().collect();
    assert_eq!(rows[0], "run,kp,ki,cost");
    assert_eq!(rows.len(), 11);

    let report = json(&fs::read(dir.path().join("sa.json")).unwrap());
    let cfg = &report["config"];
    assert_eq!(cfg["base_seed"], 1);
    assert_eq!(cfg["runs"], 10);
    assert_eq!(cfg["tuner"]["method"], "sa");
    assert_eq!(cfg["tuner"]["config"]["moves_per_temperature"], 4);
    assert_eq!(cfg["objective"]["sim"]["dt"], 1e-3);
    assert_eq!(cfg["objective"]["sim"]["t_final"], 15.0);
    assert_eq!(cfg["objective"]["index"], "ITAE");
    let runs = report["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 10);
    let costs: Vec<f64> = runs.iter().map(|r| r["cost"].as_f64().unwrap()).collect();
    assert!(costs.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(report["best"]["cost"], runs[0]["cost"]);
}

#[test]
fn tune_is_byte_identical_across_executions() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("fast.json"),
        r#"{"ga": {"generations": 10}}"#,
    )
    .unwrap();
    let args = |out: &'static str| {
        [
            "tune",
            "--method",
            "ga",
            "--runs",
            "1",
            "--seed",
            "7",
            "--config",
            "fast.json",
            "--out",
            out,
        ]
    };
    assert!(yawtune(&args("a.json"), dir.path()).status.success());
    assert!(yawtune(&args("b.json"), dir.path()).status.success());
    assert_eq!(
        fs::read(dir.path().join("a.json")).unwrap(),
        fs::read(dir.path().join("b.json")).unwrap()
    );
}

#[test]
fn tune_invalid_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.json"),
        r#"{"ga": {"tournament_size": 1}}"#,
    )
    .unwrap();
    let out = yawtune(
        &[
            "tune",
            "--method",
            "ga",
            "--config",
            "bad.json",
            "--out",
            "r.json",
            "--scatter",
            "s.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("r.json").exists());
    assert!(!dir.path().join("s.csv").exists());

    assert_eq!(
        yawtune(&["tune", "--method", "pso"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        yawtune(&["tune", "--method", "ga", "--runs", "0"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bench_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = yawtune(&["bench", "--out", "a.json"], dir.path());
    let b = yawtune(&["bench", "--out", "b.json"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let ja = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(ja, fs::read(dir.path().join("b.json")).unwrap());

    let report = json(&ja);
    let labels: Vec<&str> = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["GA", "SA", "r-locus"]);
    for row in report["reference_rows"].as_array().unwrap() {
        assert_eq!(row["source"], "published simulation benchmark");
    }
    assert_eq!(report["settings"]["band_fraction"], 0.02);
    assert_eq!(report["settings"]["sim"]["t_final"], 15.0);

    let sa_peak = report["rows"][1]["peak_time"].as_f64().unwrap();
    assert!(((sa_peak - 1.73) / 1.73).abs() <= 0.05);
    let rl_peak = report["rows"][2]["peak_time"].as_f64().unwrap();
    assert!(((rl_peak - 2.0) / 2.0).abs() <= 0.10);
    assert!(report["relative_deviation"][0]["peak_time"].is_number());
}

#[test]
fn bench_band_flag_changes_settling() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        yawtune(&["bench", "--band", "0.05", "--out", "w.json"], dir.path())
            .status
            .success()
    );
    let wide = json(&fs::read(dir.path().join("w.json")).unwrap());
    assert_eq!(wide["settings"]["band_fraction"], 0.05);
    assert!(wide["rows"][1]["settling_time"].as_f64().unwrap() < 4.084);
    assert_eq!(
        yawtune(&["bench", "--band", "0.7"], dir.path())
            .status
            .code(),
        Some(2)
    );
}
