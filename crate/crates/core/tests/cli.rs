use std::fs;
use std::path::{Path, PathBuf};

use radial_shooting::cli::{run, EXIT_OK, EXIT_USAGE};

fn cli(out: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["radial-shooting".to_string(), "--out".into(), out.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    run(argv)
}

fn run_dirs(out: &Path) -> Vec<PathBuf> {
    match fs::read_dir(out) {
        Ok(entries) => entries.map(|e| e.unwrap().path()).collect(),
        Err(_) => Vec::new(),
    }
}

fn only_run(out: &Path, prefix: &str) -> PathBuf {
    let dirs = run_dirs(out);
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    let name = dirs[0].file_name().unwrap().to_string_lossy().into_owned();
    assert!(name.starts_with(prefix), "{name}");
    dirs[0].clone()
}

#[test]
fn nonpositive_data_is_rejected_before_writing() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cli(tmp.path(), &["classify", "--xi", "1", "--eta", "0"]), EXIT_USAGE);
    assert_eq!(cli(tmp.path(), &["classify", "--xi", "-1", "--eta", "1"]), EXIT_USAGE);
    assert!(run_dirs(tmp.path()).is_empty());
}

#[test]
fn classify_writes_reproducible_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["classify", "--xi", "1", "--eta", "2.5"];
    assert_eq!(cli(tmp.path(), &args), EXIT_OK);
    let dir = only_run(tmp.path(), "classify-");
    for f in ["trajectory.csv", "verdict.json"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    let first = fs::read(dir.join("trajectory.csv")).unwrap();
    let verdict: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("verdict.json")).unwrap()).unwrap();
    assert!(verdict.to_string().contains("FirstZeroU"), "{verdict}");

    assert_eq!(cli(tmp.path(), &args), EXIT_OK);
    assert_eq!(fs::read(dir.join("trajectory.csv")).unwrap(), first);
}

#[test]
fn small_sweep_has_one_row_per_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let code = cli(tmp.path(), &["sweep", "--xi-range", "0.5,2", "--eta-range", "0.5,2", "--resolution", "2,2"]);
    assert_eq!(code, EXIT_OK);
    let dir = only_run(tmp.path(), "sweep-");
    let mut rows = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(dir.join("region.csv")).unwrap();
    assert_eq!(rows.headers().unwrap().get(2), Some("class"));
    assert_eq!(rows.records().count(), 4);
    assert!(!dir.join("region.partial.csv").exists());
}

#[test]
fn sweep_ranges_need_two_values() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cli(tmp.path(), &["sweep", "--xi-range", "0.5", "--eta-range", "0.5,2", "--resolution", "2,2"]), EXIT_USAGE);
}

#[test]
fn curve_on_incomplete_profile_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let code = cli(tmp.path(), &["--profile", "exp_power", "--alpha", "3", "curve", "--xi-grid", "1"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn band_suite_is_skipped_on_complete_profiles() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cli(tmp.path(), &["verify", "band"]), EXIT_OK);
    let dir = only_run(tmp.path(), "verify-");
    let report = fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(report.contains("SKIPPED"), "{report}");
    assert!(!report.contains("FAIL"), "{report}");
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cli(tmp.path(), &["verify", "nonsense"]), EXIT_USAGE);
}

#[test]
fn config_file_and_flags_combine() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.toml");
    fs::write(&cfg, "[profile]\nfamily = \"hyperbolic\"\nkappa = 1.0\nn = 3\n\n[classify]\nxi = 1.0\neta = 2.5\n").unwrap();
    let out = tmp.path().join("runs");
    assert_eq!(cli(&out, &["--config", cfg.to_str().unwrap(), "--rel-tol", "1e-11", "classify"]), EXIT_OK);
    only_run(&out, "classify-");

    fs::write(&cfg, "[profile]\nfamily = \"hyperbolic\"\nkapa = 1.0\nn = 3\n").unwrap();
    assert_eq!(cli(&out, &["--config", cfg.to_str().unwrap(), "classify", "--xi", "1", "--eta", "1"]), EXIT_USAGE);
}
