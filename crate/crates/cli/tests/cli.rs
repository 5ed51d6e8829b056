use std::path::{Path, PathBuf};
use std::process::Command;

use hdg_cli::config::RunConfig;
use hdg_cli::{run_case, run_study, CliError, ExitStatus};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn with_output(text: &str, dir: &Path) -> RunConfig {
    let mut cfg = RunConfig::parse(text).unwrap();
    cfg.output.dir = dir.to_path_buf();
    cfg
}

#[test]
fn couette_smoke_run_converges_and_writes_history() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("couette.toml")).unwrap();
    let cfg = with_output(&text, tmp.path());
    assert_eq!((cfg.k, cfg.level, cfg.scheme.as_str()), (2, 2, "hllem"));
    let report = run_case(&cfg).unwrap();
    assert_eq!(report.status, ExitStatus::Converged);
    let history = std::fs::read_to_string(&report.history).unwrap();
    let mut lines = history.lines();
    assert_eq!(lines.next(), Some("step,time,res_continuity,res_total,min_rho,min_p"));
    assert!(lines.count() >= 1);
    let field = std::fs::read_to_string(&report.field).unwrap();
    let row = field.lines().nth(1).unwrap();
    assert_eq!(row.split_whitespace().count(), 11);
}

#[test]
fn missing_boundary_tag_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("channel.toml"))
        .unwrap()
        .replace("wall = \"far-field\"\n", "");
    let mut cfg = with_output(&text, tmp.path());
    cfg.mesh = Some(configs().join("channel.mesh"));
    let err = run_case(&cfg).unwrap_err();
    assert!(err.to_string().contains("\"wall\""), "{err}");
}

#[test]
fn unknown_boundary_tag_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("channel.toml"))
        .unwrap()
        .replace("wall = \"far-field\"", "wall = \"far-field\"\nlid = \"inviscid-wall\"");
    let mut cfg = with_output(&text, tmp.path());
    cfg.mesh = Some(configs().join("channel.mesh"));
    let err = run_case(&cfg).unwrap_err();
    assert!(err.to_string().contains("\"lid\""), "{err}");
}

#[test]
fn mesh_file_case_preserves_free_stream() {
    let cfg = RunConfig::read(&configs().join("channel.toml")).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = cfg;
    cfg.output.dir = tmp.path().to_path_buf();
    let report = run_case(&cfg).unwrap();
    assert_eq!(report.status, ExitStatus::Converged);
    assert_eq!(report.outcome.steps(), 0);
}

#[test]
fn config_errors_carry_line_numbers() {
    let err = RunConfig::parse("case = \"ringleb\"\nk = \"two\"\n").unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
    assert!(err.to_string().contains("line 2"), "{err}");
    let err = RunConfig::parse("case = \"ringleb\"\nscheme = \"godunov\"\n").unwrap_err();
    assert!(err.to_string().contains("godunov"), "{err}");
    let err = RunConfig::parse("case = \"ringleb\"\nk = 0\n").unwrap_err();
    assert!(err.to_string().contains("k must be"), "{err}");
}

#[test]
fn single_level_study_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "case = \"ringleb\"\n[study]\nlevels = [1]\ndegrees = [1]\nschemes = [\"hll\"]\n";
    let err = run_study(&with_output(text, tmp.path())).unwrap_err();
    assert!(matches!(err, CliError::Verification(_)), "{err}");
}

#[test]
fn small_ringleb_study_writes_table() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "case = \"ringleb\"\n[time]\ndt = inf\ntol = 1e-10\n[study]\nlevels = [1, 2]\ndegrees = [1]\nschemes = [\"hll\", \"lf\"]\n";
    let report = run_study(&with_output(text, tmp.path())).unwrap();
    assert_eq!(report.blocks.len(), 2);
    let table = std::fs::read_to_string(report.table.unwrap()).unwrap();
    assert_eq!(table.lines().count(), 1 + 4);
    assert!(table.starts_with("scheme,k,level,h,dofs,err_rho,err_rhov,err_rhoE,rate_rho"));
    for b in &report.blocks {
        assert!(b.min_rate() > 1.0, "{} {}", b.scheme, b.min_rate());
    }
}

#[test]
fn study_output_is_deterministic() {
    let text = "case = \"ringleb\"\n[time]\ndt = inf\ntol = 1e-10\n[study]\nlevels = [1, 2]\ndegrees = [2]\nschemes = [\"hllem\"]\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ta = run_study(&with_output(text, a.path())).unwrap().table.unwrap();
    let tb = run_study(&with_output(text, b.path())).unwrap().table.unwrap();
    assert_eq!(std::fs::read(ta).unwrap(), std::fs::read(tb).unwrap());
}

#[test]
fn binary_reports_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    let text = std::fs::read_to_string(configs().join("couette.toml"))
        .unwrap()
        .replace("max_steps = 40", "max_steps = 1");
    std::fs::write(&cfg, text).unwrap();
    let bin = env!("CARGO_BIN_EXE_hdg");
    let out = Command::new(bin).args(["--threads", "2", "solve"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("out/couette/history.csv").exists());

    let out = Command::new(bin).arg("solve").arg(tmp.path().join("absent.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = Command::new(bin)
        .args(["flux-table", "roe:0.1", "1", "0.5", "0", "3", "--normal", "0", "-1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("trace flux"));
}

#[test]
fn wedge_roe_without_entropy_fix_exits_non_physical() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("wedge.toml"))
        .unwrap()
        .replace("scheme = \"hll\"", "scheme = \"roe:0\"");
    let report = run_case(&with_output(&text, tmp.path())).unwrap();
    assert_eq!(report.status, ExitStatus::NonPhysical);
    assert_eq!(report.status.code(), 2);
    match report.outcome.failure {
        Some(hdg_core::solver::SolverError::NonPhysicalState { min_p, .. }) => assert!(min_p < 0.0),
        other => panic!("{other:?}"),
    }
}
