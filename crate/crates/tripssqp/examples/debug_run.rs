//! Scratch driver for inspecting solver trajectories.

use tripssqp::problem::make_analytic_suite;
use tripssqp::{Budget, HessianKind, NoiseModel, OracleConfig, SolverConfig};

fn main() {
    let idx: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let iters: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    let suite = make_analytic_suite::<f64>(10, 0);
    let problem = &suite[idx];
    eprintln!(
        "problem {} d={} m={} n={}",
        problem.name(),
        problem.dim_x(),
        problem.dim_eq(),
        problem.dim_ineq()
    );
    let noise = NoiseModel::exact();
    let cfg = SolverConfig {
        budget: Budget::Iterations(iters),
        ..SolverConfig::default()
    };
    let oracle = OracleConfig {
        max_batch: 1,
        ..OracleConfig::default()
    };
    let every = (iters as usize / 40).max(1);
    let mut obs = |state: &tripssqp::SolverState<f64>, r: &tripssqp::IterationRecord| {
        if r.k as usize % every == 0 {
            eprintln!(
                "k={:6} {:24} theta={:9.3e} delta={:9.3e} rel={:9.3e} |Q|={:9.3e} pred={:?} s={:9.3e} x0={:9.6} step={:?}",
                r.k,
                r.classification.label(),
                r.theta,
                r.delta,
                r.rel_kkt,
                r.norm_q_bar,
                r.pred.map(|p| format!("{p:9.2e}")),
                state.s[0],
                state.x[0],
                r.step_norm.map(|v| format!("{v:8.2e}")),
            );
        }
    };
    let (state, trace) = tripssqp::solver::solve_with_observer(
        problem,
        &noise,
        &cfg,
        &oracle,
        HessianKind::Id,
        1,
        Some(&mut obs),
    )
    .unwrap();
    eprintln!(
        "final status {:?} k={} rel={:.3e} x={:?}",
        state.status,
        state.k,
        trace.totals.final_rel_kkt,
        state.x.as_slice()
    );
    if let Some(xs) = problem.known_solution() {
        eprintln!("known solution {:?}", xs.as_slice());
    }
}
