use std::path::Path;
use std::process::{Command, Output};

use rabi_susy::io::table::load_flow_csv;

const SMALL: [&str; 6] = ["--n-fock", "32", "--buffer", "8", "--sweep-points", "5"];

fn rabi(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi-susy"))
        .args(args)
        .current_dir(cwd)
        .env_remove("RABI_SUSY_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sweep"));
}

#[test]
fn config_file_then_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"c": 0.2513, "n_fock": 32, "buffer": 8, "k_levels": 4, "sweep": {"points": 3}}"#,
    )
    .unwrap();
    let o = rabi(
        &[
            "sweep",
            "--config",
            "run.json",
            "--k-levels",
            "3",
            "--out-csv",
            "a.csv",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("wrote 9 rows"));
    let rows = load_flow_csv(&dir.path().join("a.csv")).unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows
        .iter()
        .all(|r| r.n_fock == 32 && r.sweep_kind == "r_sweep"));
    assert_eq!(rows[0].grid_value, 0.0);
    assert_eq!(rows[8].grid_value, 1.0);
}

#[test]
fn csv_to_stdout_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "--c", "0.1"];
    args.extend(SMALL);
    let a = rabi(&args, dir.path());
    let b = rabi(&args, dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert!(stdout(&a).starts_with("sweep_kind,grid_value,level_index"));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn svg_has_one_polyline_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "--out-svg", "flow.svg", "--out-csv", "flow.csv"];
    args.extend(SMALL);
    let o = rabi(&args, dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let svg = std::fs::read_to_string(dir.path().join("flow.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 7);
}

#[test]
fn coupling_sweep_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "sweep",
        "--sweep-kind",
        "g",
        "--sweep-stop",
        "6.2832",
        "--c",
        "0.2513",
    ];
    args.extend(SMALL);
    let o = rabi(&args, dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.starts_with("g_sweep,")));
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["sweep", "--sweep-points", "1"],
        vec!["sweep", "--omega", "-1"],
        vec!["sweep", "--n-fock", "4"],
        vec!["sweep", "--config", "missing.json"],
        vec!["bogus"],
        vec!["sweep", "--omega", "fast"],
    ] {
        let o = rabi(&args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.starts_with("error:"), "{args:?}: {err}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn unknown_config_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"omgea": 1.0}"#).unwrap();
    let o = rabi(&["sweep", "--config", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("omgea"));
}

#[test]
fn verify_passes_at_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi(&["verify"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.starts_with("check,value,threshold,status"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
}

#[test]
fn witten_reports_index() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi(&["witten", "--c", "0.2513"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1.000000000"));
}

#[test]
fn goldstino_and_mass_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let o = rabi(&["goldstino"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = rabi(&["mass", "--c", "0.2513"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("16.99"));
}

#[test]
fn bad_worker_count_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rabi-susy"))
        .args(["mass"])
        .current_dir(dir.path())
        .env("RABI_SUSY_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
