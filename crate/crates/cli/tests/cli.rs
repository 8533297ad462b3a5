use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_qhalab");

fn run(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("QHALAB_OUT_DIR");
    if let Some(dir) = out_env {
        cmd.env("QHALAB_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn core_suite_writes_a_complete_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["suite", "core", "--out", out.to_str().unwrap(), "--seed", "11"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report-core.json")).unwrap()).unwrap();
    assert_eq!(report["suite"], "core");
    assert_eq!(report["environment"]["seed"], 11);
    assert!(report["environment"]["profile_version"].is_string());
    assert!(report["timing"]["total_seconds"].is_number());
    let first = &report["records"][0];
    for key in ["id", "anchor", "measured", "tolerance", "pass"] {
        assert!(!first[key].is_null(), "missing {key}");
    }
}

#[test]
fn environment_variable_sets_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["suite", "core"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("report-core.json").exists());
}

#[test]
fn failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let strict = write_config(dir.path(), "[tolerances]\n\"core.gram.fock\" = 1e-300\n");
    let o = run(&["suite", "core", "--config", &strict, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL core.gram.fock"));
    assert!(dir.path().join("report-core.json").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["suite", "nonsense"], None).status.code(), Some(2));
    assert_eq!(run(&["converge", "nonsense"], None).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(run(&["suite", "core", "--tol-scale", "0"], None).status.code(), Some(2));

    let unknown = write_config(dir.path(), "[space]\ndegre = 16\n");
    assert_eq!(run(&["suite", "core", "--config", &unknown], None).status.code(), Some(2));

    let empty = write_config(dir.path(), "[wiener]\nt_schedule = []\n");
    let o = run(&["converge", "sot", "--config", &empty], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("wiener.t_schedule"));
}

#[test]
fn truncation_study_writes_its_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["converge", "truncation", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("truncation.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("degree,identity,error"));
    let degrees: std::collections::BTreeSet<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(degrees.into_iter().collect::<Vec<_>>(), ["12", "16", "20", "24", "8"]);
}

#[test]
fn shipped_configuration_matches_the_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    assert_eq!(qhalab_cli::RunConfig::load(&path).unwrap(), qhalab_cli::RunConfig::default());
}
