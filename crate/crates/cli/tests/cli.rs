use std::path::{Path, PathBuf};
use std::process::Command;

use logfan::{read_report, Report};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn logfan(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_logfan"));
    cmd.args(args).env_remove("LOGFAN_MAX_ORBITS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn run_to_dir(command: &str, cfg: &Path, dot: bool) -> (i32, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![command, "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()];
    if dot {
        args.push("--dot");
    }
    let (code, _, _) = logfan(&args, &[]);
    (code, dir)
}

fn report_in(dir: &Path) -> Report {
    read_report(&dir.join("report.json")).unwrap()
}

#[test]
fn tate_three_builds_a_triangle() {
    let (code, dir) = run_to_dir("build-model", &config("tate3.json"), true);
    assert_eq!(code, 0);
    let report = report_in(dir.path());
    assert_eq!(report.overall, "verified");
    assert_eq!(report.model.dual_complex.as_ref().unwrap().cycle_length, Some(3));
    let dot = std::fs::read_to_string(dir.path().join("dual_complex.dot")).unwrap();
    assert!(dot.starts_with("graph dual_complex {"));
    assert_eq!(dot.matches(" -- ").count(), 3);
    assert_eq!(dot.matches("[label=").count(), 3);
}

#[test]
fn rank_zero_dot_is_a_single_node() {
    let (code, dir) = run_to_dir("build-model", &config("rank0.json"), true);
    assert_eq!(code, 0);
    let dot = std::fs::read_to_string(dir.path().join("dual_complex.dot")).unwrap();
    assert_eq!(dot.matches("[label=").count(), 1);
    assert_eq!(dot.matches(" -- ").count(), 0);
}

#[test]
fn wild_sign_action_is_a_warning() {
    let (code, dir) = run_to_dir("build-model", &config("sign_p2.json"), false);
    assert_eq!(code, 0);
    let report = report_in(dir.path());
    assert!(report.is_verified());
    assert!(!report.model.tameness.as_ref().unwrap().wild_flags.is_empty());
    assert!(report.warnings.iter().any(|w| w.starts_with("wild stabilizer")));
}

#[test]
fn overlapping_cones_fail_the_decomposition() {
    let (code, dir) = run_to_dir("check-kato", &config("overlapping_cones.json"), false);
    assert_eq!(code, 4);
    let report = report_in(dir.path());
    assert_eq!(report.failed_at.as_deref(), Some("decomposition"));
    assert!(!report.model.decomposition.as_ref().unwrap().violations.is_empty());
}

#[test]
fn check_kato_on_delaunay_cones() {
    let (code, dir) = run_to_dir("check-kato", &config("hexagonal.json"), false);
    assert_eq!(code, 0);
    let report = report_in(dir.path());
    assert!(report.model.charts.iter().all(|c| c.kato.verdict == "log_smooth"));
    assert!(report.model.dual_complex.is_none());
}

#[test]
fn delaunay_command_reports_cells() {
    let (code, dir) = run_to_dir("delaunay", &config("hexagonal.json"), false);
    assert_eq!(code, 0);
    let report = report_in(dir.path());
    assert_eq!(report.model.delaunay.as_ref().unwrap().cells.len(), 2);
    assert_eq!(report.model.decomposition.as_ref().unwrap().counts_by_dim, vec![0, 1, 3, 2]);
}

#[test]
fn bad_configs_exit_with_the_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"rank":1,"b":[[0]],"group":{"generators":[],"residue_char":5}}"#, "form not positive definite"),
        (r#"{"rank":1,"b":[[3]],"group":{"generators":[[[2]]],"residue_char":5}}"#, "generator g0 not unimodular"),
        (r#"{"rank":1,"b":[[3]]}"#, "group"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("c{i}.json"));
        std::fs::write(&path, text).unwrap();
        let (code, _, err) = logfan(&["build-model", "--config", path.to_str().unwrap()], &[]);
        assert_eq!(code, 2, "{err}");
        assert!(err.contains(needle), "{err}");
    }
}

#[test]
fn missing_config_is_an_io_error() {
    let (code, _, _) = logfan(&["build-model", "--config", "/nonexistent/job.json"], &[]);
    assert_eq!(code, 8);
}

#[test]
fn orbit_cap_comes_from_the_environment() {
    let cfg = config("tate3.json");
    let (code, out, _) = logfan(&["build-model", "--config", cfg.to_str().unwrap()], &[("LOGFAN_MAX_ORBITS", "2")]);
    assert_eq!(code, 6);
    let report: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(report.failed_at.as_deref(), Some("admissibility"));
    let (code, _, _) = logfan(&["build-model", "--config", cfg.to_str().unwrap()], &[("LOGFAN_MAX_ORBITS", "lots")]);
    assert_eq!(code, 2);
}

#[test]
fn report_command_rerenders_a_stored_report() {
    let (_, dir) = run_to_dir("build-model", &config("tate3.json"), false);
    let stored = dir.path().join("report.json");
    let (code, out, _) = logfan(&["report", "--config", stored.to_str().unwrap()], &[]);
    assert_eq!(code, 0);
    assert_eq!(out, std::fs::read_to_string(&stored).unwrap());
    let (code, dot, _) = logfan(&["report", "--config", stored.to_str().unwrap(), "--dot"], &[]);
    assert_eq!(code, 0);
    assert_eq!(dot.matches(" -- ").count(), 3);
}

#[test]
fn jobs_and_seed_do_not_change_the_model() {
    let cfg = config("square_rotation.json");
    let (c1, one, _) = logfan(&["build-model", "--config", cfg.to_str().unwrap(), "--jobs", "1"], &[]);
    let (c2, two, _) = logfan(&["build-model", "--config", cfg.to_str().unwrap(), "--jobs", "3", "--seed", "9"], &[]);
    assert_eq!((c1, c2), (0, 0));
    let a: Report = serde_json::from_str(&one).unwrap();
    let b: Report = serde_json::from_str(&two).unwrap();
    assert_eq!(a.model, b.model);
    assert_eq!(b.provenance.seed, 9);
    let (code, _, _) = logfan(&["build-model", "--config", cfg.to_str().unwrap(), "--jobs", "0"], &[]);
    assert_eq!(code, 2);
}

#[test]
fn json_round_trip() {
    let (_, dir) = run_to_dir("build-model", &config("square_rotation.json"), false);
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(logfan::report_json(&report), text);
}
