//! End-to-end tests of the `eit-engine` binary: exit codes, CSV shape,
//! determinism and config handling.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eit-engine"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to spawn binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn spectrum_csv_is_deterministic_and_well_formed() {
    let args = ["spectrum", "--grid", "-5:5:11", "--method", "both"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "stderr: {}", stderr(&a));
    assert_eq!(a.stdout, b.stdout, "repeated runs must be byte-identical");

    let text = stdout(&a);
    let mut lines = text.lines();
    let header = lines.next().expect("missing header");
    assert!(header.starts_with("delta_pr_2pi_mhz,"), "header: {header}");
    assert!(header.contains("brightness_closed_form"), "header: {header}");
    assert!(header.contains("brightness_floquet"), "header: {header}");
    let cols = header.split(',').count();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11, "one data row per grid point");
    for row in rows {
        assert_eq!(row.split(',').count(), cols, "ragged row: {row}");
    }
}

#[test]
fn config_file_and_out_flag_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.conf");
    std::fs::write(
        &cfg_path,
        "# control engine, coarse grid\nvariant = HE_c\ngrid_min = -3\ngrid_max = 3\ngrid_points = 7\n",
    )
    .unwrap();
    let out_path = dir.path().join("sweep.csv");

    let out = run(&[
        "spectrum",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(out.stdout.is_empty(), "CSV must go to --out, not stdout");

    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(csv.lines().count(), 8, "header + 7 grid points");

    // the same sweep via flags only must agree byte-for-byte
    let flags = run(&["spectrum", "--grid", "-3:3:7", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(stdout(&flags), csv);
}

#[test]
fn modulation_requires_a_mirror_coupled_variant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("pump.conf");
    std::fs::write(&cfg_path, "variant = HE_pu\n").unwrap();
    let out = run(&["modulation", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "config error exit code");
    assert!(stderr(&out).contains("variant"), "stderr: {}", stderr(&out));
}

#[test]
fn invalid_config_exits_one_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.conf");
    std::fs::write(&cfg_path, "t_41_k = 0\n").unwrap();
    let out = run(&["spectrum", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("t_41_k"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_flag_exits_one() {
    let out = run(&["spectrum", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["spectrum", "--help"]).status.code(), Some(0));
}

#[test]
fn verify_passes_on_defaults_and_reports_checks() {
    let out = run(&["verify", "--grid", "-10:10:21"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    for check in [
        "trace_preservation",
        "hermiticity",
        "positivity",
        "oracle_equivalence_dc",
        "oracle_equivalence_modulation",
        "entropy_bounds",
    ] {
        assert!(text.contains(&format!("check={check}")), "missing {check}:\n{text}");
    }
    assert!(text.contains("result=pass"), "{text}");
}

#[test]
fn verify_warns_on_large_modulation_depth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("deep.conf");
    std::fs::write(&cfg_path, "epsilon = 0.5\n").unwrap();
    let out = run(&["verify", "--config", cfg_path.to_str().unwrap(), "--grid", "-10:10:21"]);
    assert!(
        stdout(&out).contains("warning="),
        "expected a depth warning in the report: {}",
        stdout(&out)
    );
}

#[test]
fn table_mismatches_exit_three_with_status_column() {
    let out = run(&["table", "--table-id", "1"]);
    assert_eq!(out.status.code(), Some(3), "reference mismatch exit code");
    let text = stdout(&out);
    let header = text.lines().next().expect("missing header");
    assert!(header.contains("status"), "header: {header}");
    assert!(text.contains("fail"), "{text}");
}

#[test]
fn bounds_prints_limits_for_each_variant() {
    for (variant, expect_lower) in [("HE_pu", "1.527"), ("HE_c", "1.527"), ("HE_puc", "-3.055")] {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("v.conf");
        std::fs::write(&cfg_path, format!("variant = {variant}\n")).unwrap();
        let out = run(&["bounds", "--config", cfg_path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        let text = stdout(&out);
        assert!(text.contains("6.110"), "{variant}: {text}");
        assert!(text.contains(expect_lower), "{variant}: {text}");
    }
}

#[test]
fn binary_path_exists() {
    assert!(Path::new(env!("CARGO_BIN_EXE_eit-engine")).exists());
}
