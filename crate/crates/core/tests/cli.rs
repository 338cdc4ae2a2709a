use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pr_bounds::report::VerificationReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pr-bounds"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn text(o: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    )
}

const SMALL: &str = r#"
schema_version = 1

[[scenario]]
name = "lorentz_small"
outputs = ["trace", "envelope", "sumrules"]
envelope = "combined"

[scenario.model]
kind = "lorentz"
eps_inf = 1.0
omega_p = "1 rad/s"
omega_0 = "1 rad/s"
nu = "0.5 rad/s"

[scenario.grid]
start = "0 s"
stop = "10 /w0"
count = 300
"#;

#[test]
fn run_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let out = dir.path().join("out");
    let o = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("PASS lorentz_small"));
    for name in [
        "lorentz_small.csv",
        "lorentz_small.report.json",
        "lorentz_small.timing.json",
    ] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let report = VerificationReport::from_json(
        &fs::read_to_string(out.join("lorentz_small.report.json")).unwrap(),
    )
    .unwrap();
    assert!(report.passed);
    assert_eq!(report.corner_time, Some(2.0));
    let csv = fs::read_to_string(out.join("lorentz_small.csv")).unwrap();
    assert!(csv.starts_with("t_seconds,response,center,bound_lo,bound_hi,in_bounds\n"));
    assert_eq!(csv.lines().count(), 301);
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("lorentz_oscillator.toml");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    }
    let mut compared = 0;
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        let name = name.to_str().unwrap();
        if name.ends_with(".timing.json") {
            continue;
        }
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name} differs between runs"
        );
        compared += 1;
    }
    assert_eq!(compared, 6);
}

#[test]
fn config_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, SMALL.replace("\"0.5 rad/s\"", "0.5")).unwrap();
    let o = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let msg = text(&o);
    assert!(msg.contains("bad.toml:14"), "{msg}");
    assert!(msg.contains("unit"), "{msg}");

    let missing = run(&["run", "/nonexistent/config.toml"]);
    assert_eq!(missing.status.code(), Some(2), "{}", text(&missing));

    let unknown_profile = run(&["selftest", "--tolerance-profile", "loose"]);
    assert_eq!(unknown_profile.status.code(), Some(2));
}

#[test]
fn table_prints_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let db = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/metals_bb.toml");
    let o = run(&[
        "table",
        db.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout
        .lines()
        .any(|l| l.starts_with("Au") && l.contains("17.0") && l.contains("38.7")));
    let csv = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn table_mismatch_is_a_verification_failure() {
    let dir = tempfile::tempdir().unwrap();
    let db = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/metals_bb.toml");
    let edited = fs::read_to_string(db).unwrap().replace(
        "table_hbar_omega_p_ev = 17.0",
        "table_hbar_omega_p_ev = 18.0",
    );
    let path = dir.path().join("metals.toml");
    fs::write(&path, edited).unwrap();
    let o = run(&[
        "table",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    assert!(text(&o).contains("MISMATCH"));
}

#[test]
fn selftest_passes_and_reports_corrupt_database() {
    let o = run(&["selftest", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("metals.toml");
    fs::write(&path, "[[metal]]\nsymbol = \"Au\"\nplasma = ").unwrap();
    let o = run(&["selftest", "--db", path.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert!(text(&o).contains("metal database error"), "{}", text(&o));
}
