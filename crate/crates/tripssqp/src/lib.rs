//! Trust-region interior-point stochastic SQP (TR-IP-SSQP).
//!
//! This crate solves
//!
//! ```text
//! min f(x)   s.t.  c(x) = 0,  h(x) <= 0,
//! ```
//!
//! where only noisy estimates of `f` and its gradient are available while the
//! constraints are deterministic. Inequalities are handled with slack
//! variables and a log-barrier term whose weight follows a prescribed
//! decaying schedule; each iteration solves a trust-region SQP subproblem for
//! the barrier problem via a normal/tangential step decomposition. Objective
//! estimates come from probabilistic oracles whose batch sizes adapt to the
//! trust-region radius and a reliability parameter.
//!
//! The crate also ships a fixed-sampling baseline (one gradient sample per
//! iteration, no acceptance test) for benchmarking adaptive against fixed
//! sampling, a small analytic test-problem suite with configurable noise,
//! and constrained logistic-regression problem generators.
//!
//! All numerical code is generic over the scalar type through [`Scalar`];
//! `f64` is the intended default and the aliases at the crate root
//! ([`Problem64`], [`SolverConfig64`], ...) pin it.

pub mod cost;
pub mod error;
pub mod hessian;
pub mod kkt;
pub mod merit;
pub mod noise;
pub mod oracle;
pub mod problem;
pub mod rng;
pub mod scalar;
pub mod solver;
pub mod step;
pub mod trace;

pub use error::Error;
pub use hessian::{HessianKind, HessianModel, WBar};
pub use kkt::ConstraintBlock;
pub use merit::MeritState;
pub use noise::{NoiseKind, NoiseModel};
pub use oracle::{OracleConfig, OracleEstimate};
pub use problem::ProblemInstance;
pub use scalar::Scalar;
pub use solver::{
    solve, solve_fully_stochastic, BarrierSchedule, BaselineConfig, Budget, SolverConfig,
    SolverState, SolverStatus,
};
pub use step::StepResult;
pub use trace::{Classification, IterationRecord, RunTrace};

/// Concrete `f64` instantiations of the main entry points.
pub type Real = f64;
pub type Problem64 = problem::ProblemInstance<f64>;
pub type NoiseModel64 = noise::NoiseModel<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type OracleConfig64 = oracle::OracleConfig<f64>;
pub type BaselineConfig64 = solver::BaselineConfig<f64>;
