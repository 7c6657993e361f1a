//! Zero-noise convergence sweep of the fixed-sampling baseline.

use tripssqp::problem::make_analytic_suite;
use tripssqp::{
    solve_fully_stochastic, BaselineConfig, Budget, HessianKind, NoiseModel, SolverConfig,
};

fn main() {
    let iters: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let suite = make_analytic_suite::<f64>(10, seed);
    let noise = NoiseModel::exact();
    let cfg = SolverConfig {
        budget: Budget::Iterations(iters),
        max_iters: iters,
        ..SolverConfig::default()
    };
    let baseline = BaselineConfig::default();
    for problem in &suite {
        match solve_fully_stochastic(problem, &noise, &cfg, &baseline, HessianKind::Id, 1) {
            Ok((state, trace)) => {
                let min_rel = trace
                    .records
                    .iter()
                    .map(|r| r.rel_kkt)
                    .fold(f64::INFINITY, f64::min);
                eprintln!(
                    "{:38} {:18} k={:6} rel={:9.3e} min_rel={:9.3e}",
                    problem.name(),
                    format!("{:?}", state.status),
                    state.k,
                    trace.totals.final_rel_kkt,
                    min_rel,
                );
            }
            Err(e) => eprintln!("{:38} ERROR {e}", problem.name()),
        }
    }
}
