//! Zero-noise convergence sweep across the analytic suite.

use tripssqp::problem::make_analytic_suite;
use tripssqp::{solve, Budget, HessianKind, NoiseModel, OracleConfig, SolverConfig};

fn main() {
    let iters: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let kind = match std::env::args().nth(3).as_deref() {
        Some("sr1") => HessianKind::Sr1,
        Some("esth") => HessianKind::EstH,
        Some("aveh") => HessianKind::AveH,
        _ => HessianKind::Id,
    };
    let suite = make_analytic_suite::<f64>(10, seed);
    let noise = NoiseModel::exact();
    let cfg = SolverConfig {
        budget: Budget::Iterations(iters),
        ..SolverConfig::default()
    };
    let oracle = OracleConfig {
        max_batch: 1,
        ..OracleConfig::default()
    };
    let start = std::time::Instant::now();
    for problem in &suite {
        let t0 = std::time::Instant::now();
        match solve(problem, &noise, &cfg, &oracle, kind, 1) {
            Ok((state, trace)) => {
                let min_rel = trace
                    .records
                    .iter()
                    .map(|r| r.rel_kkt)
                    .fold(f64::INFINITY, f64::min);
                eprintln!(
                    "{:38} {:18} k={:6} rel={:9.3e} min_rel={:9.3e} [{:.2}s]",
                    problem.name(),
                    format!("{:?}", state.status),
                    state.k,
                    trace.totals.final_rel_kkt,
                    min_rel,
                    t0.elapsed().as_secs_f64(),
                );
            }
            Err(e) => eprintln!("{:38} ERROR {e}", problem.name()),
        }
    }
    eprintln!("total {:.1}s", start.elapsed().as_secs_f64());
}
