use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_losmimo"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn every_subcommand_writes_its_csv_and_prints_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m_h = 2\nm_v = 2\nm = 4\nmodel = approx\nsweep_variable = delta\nsweep_count = 3\nsweep_start = 0.5\nsweep_stop = 0.9\n",
    );
    for (cmd, first_col) in [
        ("spacing-sweep", "delta_m"),
        ("geometry-sweep", "m"),
        ("capacity", "model"),
        ("optimize", "objective"),
        ("gram-check", "model"),
    ] {
        let out_path = dir.path().join(format!("{cmd}.csv"));
        let out = run(&[
            cmd,
            "--config",
            cfg.to_str().unwrap(),
            "--output",
            out_path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(
            String::from_utf8(out.stdout).unwrap().trim(),
            out_path.to_str().unwrap()
        );
        let text = std::fs::read_to_string(&out_path).unwrap();
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header.split(',').next().unwrap(), first_col, "{cmd}");
    }
}

#[test]
fn xpd_sweep_honours_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.csv");
    let cfg = write_config(dir.path(), &format!("output = {}\n", out_path.display()));
    let out = run(&[
        "xpd-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "sweep_variable=kappa",
        "--set",
        "sweep_count=2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn gram_check_reports_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m_h = 4\nm_v = 4\nmodel = approx\n");
    let out_path = dir.path().join("g.csv");
    let out = run(&[
        "gram-check",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("max off-diagonal"));
}

#[test]
fn bad_config_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "colour = red\n");
    let out = run(&["capacity", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.starts_with("error:") && err.contains("unknown key `colour`"),
        "{err}"
    );

    let out = run(&["capacity", "--config", "/nonexistent/run.cfg"]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("/nonexistent/run.cfg"));

    let cfg = write_config(dir.path(), "gamma = 0.1\nkappa = 0.3\n");
    let out = run(&["capacity", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m = 4\n");
    let out = run(&[
        "geometry-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        "/nonexistent/o.csv",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("/nonexistent/o.csv"));
}
