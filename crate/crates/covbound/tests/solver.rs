use std::time::Duration;

use covbound::sdpa::write_sdpa_sparse;
use covbound::solverio::{default_margin, finalize_bound, invoke_solver, solve_problem, SolverConfig, SolverStatus};
use covbound_core::inequalities::{sphere_covering, van_wee};
use covbound_core::sdpmodel::build_sdp;
use covbound_core::{BigInt, ObjectiveKind};

fn bundled() -> SolverConfig {
    SolverConfig::new(vec![env!("CARGO_BIN_EXE_covbound-sdpa").to_string()])
}

#[test]
fn toy_problem_through_the_bundled_binary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.dat-s");
    // minimize x1 + x2 subject to [[x1, 1], [1, x2]] ⪰ 0: optimum 2
    std::fs::write(&path, "\"toy\n2\n1\n2\n1 1\n0 1 1 2 -1\n1 1 1 1 1\n2 1 2 2 1\n").unwrap();
    let report = invoke_solver(&path, &bundled());
    assert_eq!(report.status, SolverStatus::Optimal, "{report:?}");
    let dual = report.dual_objective.unwrap();
    assert!((num_traits::ToPrimitive::to_f64(&dual).unwrap() - 2.0).abs() < 1e-6);
    assert!(report.raw_log_path.unwrap().exists());
    assert!(path.with_extension("out").exists());
}

#[test]
fn sphere_covering_instance_rounds_to_four() {
    let dir = tempfile::tempdir().unwrap();
    let ineqs = [sphere_covering(2, 4, 1).unwrap(), van_wee(4, 1).unwrap()];
    let problem = build_sdp(2, 4, 1, &ineqs, ObjectiveKind::Triple).unwrap();
    let report = solve_problem(&problem, &dir.path().join("k241.dat-s"), 40, &bundled()).unwrap();
    let result = finalize_bound(&report, &problem, &default_margin()).unwrap();
    assert_eq!(result.integer_bound, BigInt::from(4));
    assert!((result.root_value - 3.9999).abs() < 1e-3);
}

#[test]
fn missing_executable_is_a_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.dat-s");
    let problem = build_sdp(2, 3, 1, &[sphere_covering(2, 3, 1).unwrap()], ObjectiveKind::Triple).unwrap();
    write_sdpa_sparse(&problem, &path, 20).unwrap();
    let report = invoke_solver(&path, &SolverConfig::new(vec!["/nonexistent/solver".into()]));
    assert_eq!(report.status, SolverStatus::SolverError);
    assert!(report.diagnostic.is_some());
    assert!(finalize_bound(&report, &problem, &default_margin()).is_err());
}

#[test]
fn zero_timeout_always_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.dat-s");
    let problem = build_sdp(2, 3, 1, &[sphere_covering(2, 3, 1).unwrap()], ObjectiveKind::Triple).unwrap();
    write_sdpa_sparse(&problem, &path, 20).unwrap();
    let mut config = bundled();
    config.timeout = Duration::ZERO;
    let report = invoke_solver(&path, &config);
    assert_eq!(report.status, SolverStatus::SolverError);
    assert!(report.diagnostic.unwrap().contains("timeout"));
}

#[test]
fn parameter_file_is_forwarded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.dat-s");
    let problem = build_sdp(2, 6, 1, &[sphere_covering(2, 6, 1).unwrap()], ObjectiveKind::Triple).unwrap();
    write_sdpa_sparse(&problem, &path, 40).unwrap();
    let param = dir.path().join("param.sdpa");
    std::fs::write(&param, "1 unsigned int maxIteration;\n").unwrap();
    let mut config = bundled();
    config.param_file = Some(param);
    let report = invoke_solver(&path, &config);
    assert_ne!(report.status, SolverStatus::Optimal, "one iteration cannot converge: {report:?}");
}
