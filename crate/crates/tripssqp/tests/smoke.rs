//! End-to-end smoke checks at zero noise.

use tripssqp::problem::{finite_difference_check, make_analytic_suite};
use tripssqp::{
    solve, solve_fully_stochastic, BaselineConfig, Budget, HessianKind, NoiseModel, OracleConfig,
    SolverConfig, SolverStatus,
};

#[test]
fn suite_constructs_and_derivatives_match() {
    let suite = make_analytic_suite::<f64>(10, 42);
    assert_eq!(suite.len(), 10);
    for p in &suite {
        finite_difference_check(p, p.x0(), 1e-5).unwrap();
    }
}

#[test]
fn zero_noise_solve_converges_on_first_problem() {
    let suite = make_analytic_suite::<f64>(1, 0);
    let problem = &suite[0];
    let noise = NoiseModel::exact();
    let cfg = SolverConfig {
        budget: Budget::Iterations(100_000),
        ..SolverConfig::default()
    };
    let oracle = OracleConfig {
        max_batch: 1,
        ..OracleConfig::default()
    };
    let (state, trace) = solve(problem, &noise, &cfg, &oracle, HessianKind::Id, 1).unwrap();
    eprintln!(
        "status {:?} after k={} rel_kkt={:.3e}",
        state.status, state.k, trace.totals.final_rel_kkt
    );
    assert_eq!(state.status, SolverStatus::Converged);
}

#[test]
fn zero_noise_baseline_converges_on_first_problem() {
    let suite = make_analytic_suite::<f64>(1, 0);
    let problem = &suite[0];
    let noise = NoiseModel::exact();
    let cfg = SolverConfig {
        budget: Budget::Iterations(200_000),
        max_iters: 200_000,
        ..SolverConfig::default()
    };
    let baseline = BaselineConfig::default();
    let (state, trace) =
        solve_fully_stochastic(problem, &noise, &cfg, &baseline, HessianKind::Id, 1).unwrap();
    eprintln!(
        "baseline status {:?} after k={} rel_kkt={:.3e}",
        state.status, state.k, trace.totals.final_rel_kkt
    );
    assert_eq!(state.status, SolverStatus::Converged);
}
