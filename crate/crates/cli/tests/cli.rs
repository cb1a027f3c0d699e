//! Command-line behavior: exit codes, outputs and architecture presets.

use std::path::{Path, PathBuf};
use std::process::Command;

use cvqan::architecture::ArchitectureKind;
use cvqan::runner::run_policy;
use cvqan::scenario::Scenario;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn toy_text() -> String {
    std::fs::read_to_string(scenarios().join("toy.toml")).unwrap()
}

fn run(args: &[&str], scenario: &Path, out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_cvqan"))
        .args(args)
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn skr_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["skr"], &scenarios().join("toy.toml"), dir.path()), 0);
    let json = std::fs::read_to_string(dir.path().join("skr_local-trusted-AC.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["network_aggregate"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(dir.path().join("skr_local-trusted-AC.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
}

#[test]
fn missing_scenario_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["skr"], &dir.path().join("absent.toml"), dir.path()), 1);
}

#[test]
fn wrong_schema_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), &toy_text().replace("cvqan-scenario/1", "cvqan-scenario/9"));
    assert_eq!(run(&["skr"], &p, dir.path()), 2);
}

#[test]
fn invalid_values_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), &toy_text().replace("detector_efficiency = 0.56", "detector_efficiency = 1.5"));
    assert_eq!(run(&["skr"], &p, dir.path()), 2);
    let p = write_scenario(dir.path(), &toy_text().replace("n_b = 2", "n_b = 0"));
    assert_eq!(run(&["bounds"], &p, dir.path()), 2);
}

#[test]
fn non_orthogonal_allocation_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = toy_text().replace("isolation_db = 30.0", "allocation_matrix = [[1.0, 0.5], [0.0, 1.0]]");
    let p = write_scenario(dir.path(), &text);
    assert_eq!(run(&["skr"], &p, dir.path()), 2);
}

#[test]
fn clamped_rate_exits_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), &toy_text().replace("distance_km = 5.0", "distance_km = 300.0"));
    assert_eq!(run(&["skr", "--policy", "local-trusted-AC"], &p, dir.path()), 4);
}

#[test]
fn large_prepare_and_measure_run_needs_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["pm-validate"], &scenarios().join("tsqan304.toml"), dir.path()), 2);
}

#[test]
fn covmat_exports_each_view() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["covmat"], &scenarios().join("toy.toml"), dir.path()), 0);
    for view in ["initial", "post-allocation", "post-splitting", "bob-side"] {
        let m = cvqan::output::read_matrix(
            &std::fs::read_to_string(dir.path().join(format!("covariance_{view}.txt"))).unwrap(),
        )
        .unwrap();
        assert_eq!(m, m.transpose(), "{view}");
    }
}

#[test]
fn architecture_presets_compare_as_expected() {
    let base = Scenario::load(&scenarios().join("tsqan304.toml")).unwrap();
    let policy = base.policies[0].clone();
    let aggregate = |kind| {
        let mut s = base.clone();
        s.architecture.kind = kind;
        run_policy(&s, &policy).unwrap()
    };
    let (tsqan, dwdm, tdm, bs) = (
        aggregate(ArchitectureKind::Tsqan),
        aggregate(ArchitectureKind::Dwdm),
        aggregate(ArchitectureKind::Tdm),
        aggregate(ArchitectureKind::Bs),
    );
    assert_eq!(bs.report.per_user.len(), 128);
    assert_eq!(tdm.replicas, 304);
    assert!(dwdm.network_aggregate > tsqan.network_aggregate);
    assert!(tsqan.network_aggregate > tdm.network_aggregate);
    assert!(tsqan.network_aggregate > bs.network_aggregate);
    let single = tdm.report.per_user[0].key_rate * 304.0;
    assert!((tdm.network_aggregate - single).abs() <= 1e-9 * single);
}
