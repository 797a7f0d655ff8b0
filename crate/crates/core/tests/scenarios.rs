use hartogs_core::bundle::Scale;
use hartogs_core::scenarios::{
    emit_report, run_dim2, run_dimn, selftest, CertificateReport, ReportFormat, ScenarioConfig, Status,
};

fn status(rep: &CertificateReport, name: &str) -> Status {
    rep.check(name).unwrap_or_else(|| panic!("{name} missing")).status
}

#[test]
fn dim2_default_passes_with_rank_one() {
    let rep = run_dim2(&ScenarioConfig::default()).unwrap();
    assert!(rep.passed(), "{}", rep.to_text());
    assert_eq!(rep.check("dim2.cohomology").unwrap().metrics["h1_rank"], 1);
    assert_eq!(rep.checks.iter().filter(|c| c.status == Status::Trusted).count(), 3);
}

#[test]
fn constant_cocycle_is_a_coboundary() {
    let mut cfg = ScenarioConfig::default();
    cfg.debug.cocycle = Some(vec![1, 1]);
    let rep = run_dim2(&cfg).unwrap();
    assert_eq!(status(&rep, "dim2.cohomology"), Status::Fail);
    assert_eq!(rep.check("dim2.cohomology").unwrap().metrics["non_coboundary"], false);
    assert_eq!(status(&rep, "dim2.cover"), Status::Pass);
    assert!(!rep.passed());
}

#[test]
fn full_scale_push_is_trivial() {
    let mut cfg = ScenarioConfig::default();
    cfg.debug.scale = Some(Scale::Full);
    let rep = run_dim2(&cfg).unwrap();
    assert_eq!(status(&rep, "dim2.cohomology"), Status::Pass);
    assert_eq!(status(&rep, "dim2.bundle"), Status::Fail);
    assert_eq!(rep.check("dim2.bundle").unwrap().metrics["obstructed"], false);
    assert!(!rep.passed());
}

#[test]
fn dim2_rejects_small_r() {
    let cfg = ScenarioConfig { r: 3.0, ..Default::default() };
    assert!(run_dim2(&cfg).is_err());
}

#[test]
fn eps_at_least_n_refuses_the_convex_patch() {
    let cfg = ScenarioConfig { epsilon: Some(2.5), ..ScenarioConfig::with_n(2) };
    let rep = run_dimn(&cfg).unwrap();
    assert_eq!(status(&rep, "dimn.negative_control"), Status::Pass);
    assert_eq!(status(&rep, "dimn.convex_patch"), Status::Fail);
    let err = rep.check("dimn.convex_patch").unwrap().metrics["error"].as_str().unwrap().to_string();
    assert!(err.contains(">= n"), "{err}");
    assert_eq!(status(&rep, "dimn.l_nt"), Status::Pass);
    assert!(!rep.passed());
}

#[test]
fn invalid_configs_are_errors() {
    for cfg in [
        ScenarioConfig::with_n(1),
        ScenarioConfig { safety: 1.5, ..Default::default() },
        ScenarioConfig { samples: 0, ..Default::default() },
        ScenarioConfig { epsilon: Some(-1.0), ..Default::default() },
    ] {
        assert!(run_dimn(&cfg).is_err());
    }
}

#[test]
fn tiny_budget_fails_only_the_connectivity_step() {
    let cfg = ScenarioConfig { budget_nodes: 1000, ..ScenarioConfig::with_n(2) };
    let rep = run_dimn(&cfg).unwrap();
    assert_eq!(status(&rep, "dimn.connectivity"), Status::Fail);
    assert_eq!(status(&rep, "dimn.obstruction"), Status::Pass);
}

#[test]
fn every_check_appears_once() {
    let rep = run_dim2(&ScenarioConfig::default()).unwrap();
    let mut names: Vec<_> = rep.checks.iter().map(|c| c.name.clone()).collect();
    let total = names.len();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), total);
}

#[test]
fn emitted_report_round_trips() {
    let rep = selftest(&ScenarioConfig::default()).unwrap();
    assert!(rep.passed());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    emit_report(&rep, &path, ReportFormat::Json).unwrap();
    let back = CertificateReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, rep);
    let text = dir.path().join("r.txt");
    emit_report(&rep, &text, ReportFormat::Text).unwrap();
    assert!(std::fs::read_to_string(&text).unwrap().contains("overall: PASS"));
}

#[test]
fn unwritable_path_is_an_io_error() {
    let rep = selftest(&ScenarioConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("r.json");
    assert!(matches!(emit_report(&rep, &path, ReportFormat::Json), Err(hartogs_core::Error::Io(_))));
}
