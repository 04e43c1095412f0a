use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], config: &str, dir: &Path) -> Output {
    let path = dir.join("run.json");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ergodic-jacobi"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

#[test]
fn free_check_passes_with_tight_slack() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["check"], r#"{"model": {"kind": "free"}}"#, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read(dir.path(), "summary.csv");
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("name,lhs,relation,rhs,holds,slack,tolerance"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[4], "true", "{line}");
        if f[0] == "measure_bound" || f[0].starts_with("gap_bound") {
            let lhs: f64 = f[1].parse().unwrap();
            let rhs: f64 = f[3].parse().unwrap();
            assert!((rhs - lhs).abs() <= 0.03 * rhs, "{line}");
        }
    }
}

#[test]
fn shifted_single_site_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(
        &["spectrum"],
        r#"{"model": {"kind": "periodic", "a": [1], "b": [3]}}"#,
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(read(dir.path(), "spectrum.csv"), "l,r\n1,5\n");
}

#[test]
fn invalid_model_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(
        &["check"],
        r#"{"model": {"kind": "almost_mathieu", "lambda": 0, "alpha": 0.618}}"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("λ must be nonzero"), "{err}");
    assert!(!dir.path().join("out").join("report.json").exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(
        &["dos"],
        r#"{"model": {"kind": "free"}, "dos": {"sites": 10}}"#,
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dos"));
}

#[test]
fn replays_are_byte_identical() {
    let config = r#"{"model": {"kind": "anderson", "width": 2, "seed": 5},
        "seed": 11, "dos": {"n_sites": 300, "n_samples": 4, "m_bins": 40},
        "lyapunov": {"n_steps": 500, "n_samples": 3}, "curve": {"points": 21}}"#;
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    for dir in [&first, &second] {
        for cmd in ["dos", "lyapunov"] {
            let out = cli(&[cmd], config, dir.path());
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            let name = format!("{cmd}.csv");
            std::fs::copy(dir.path().join("out").join(&name), dir.path().join(&name)).unwrap();
        }
    }
    for name in ["dos.csv", "lyapunov.csv"] {
        let a = std::fs::read(first.path().join(name)).unwrap();
        let b = std::fs::read(second.path().join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn report_embeds_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"model": {"kind": "free"}, "dos": {"n_sites": 200, "n_samples": 2}}"#,
    )
    .unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_ergodic-jacobi"))
        .args(["dos", "--seed", "42", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "dos");
    assert_eq!(report["config"]["seed"], 42);
    assert_eq!(report["config"]["dos"]["seed"], 42);
    assert_eq!(report["config"]["dos"]["n_sites"], 200);
    assert_eq!(report["dos"]["eigenvalues"], 400);
}
