//! Outer loops: the adaptive-sampling trust-region interior-point SSQP
//! method and its fully-stochastic fixed-sampling counterpart.
//!
//! One iteration of the adaptive method: draw a gradient estimate with the
//! Δ-adapted batch, build `H̄`/`W̄` and the stationarity measure `Q̄`, check
//! the gate `‖Q̄‖/max{1,‖W̄‖} ≥ ηΔ`, compute the normal/tangential step, run
//! the merit-parameter loop, draw the two value estimates, and accept or
//! reject by the ratio test `Ared ≤ η·Pred`. Accepted steps grow Δ (capped
//! at Δ_max) and classify as reliable (`-Pred ≥ ε̄`, growing ε̄) or
//! unreliable (shrinking ε̄); rejected and gate-failed iterations shrink
//! both. The barrier parameter follows its schedule indexed by the global
//! iteration counter, successful or not.
//!
//! The baseline draws one gradient sample per iteration, never estimates
//! objective values, always applies the step, and generates its radius from
//! `‖Q̄‖` (`Δ = min{β‖Q̄‖/ζ_b, β·δ_b}`).

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cost;
use crate::error::{Error, Result};
use crate::hessian::{HessianInputs, HessianKind, HessianModel, WBar};
use crate::kkt::{build_block, reference_scale, relative_kkt_residual};
use crate::merit::{
    actual_reduction, merit_loop, merit_loop_with_threshold, merit_threshold, MeritState,
};
use crate::noise::NoiseModel;
use crate::oracle::{
    estimate_gradient, estimate_gradient_with_batch, estimate_value_pair, OracleConfig,
};
use crate::problem::ProblemInstance;
use crate::rng::combine;
use crate::scalar::{real, Scalar};
use crate::step::compute_step;
use crate::trace::{Classification, IterationRecord, RunTrace, Totals};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    Running,
    Converged,
    BudgetExhausted,
    Singular,
    MeritDivergence,
}

impl SolverStatus {
    pub fn label(self) -> &'static str {
        match self {
            SolverStatus::Running => "running",
            SolverStatus::Converged => "converged",
            SolverStatus::BudgetExhausted => "budget-exhausted",
            SolverStatus::Singular => "singular",
            SolverStatus::MeritDivergence => "merit-divergence",
        }
    }
}

/// Barrier parameter schedule `θ_k`, strictly positive and non-increasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BarrierSchedule<T> {
    /// `θ_k = q^k` with `q ∈ (0,1)`.
    Geom { q: T },
    /// `θ_k = max{k,1}^{-p}` with `p > 0` (the power is undefined at `k=0`).
    Power { p: T },
}

impl<T: Scalar> BarrierSchedule<T> {
    pub fn value(&self, k: u64) -> T {
        match self {
            BarrierSchedule::Geom { q } => q.powi(k as i32),
            BarrierSchedule::Power { p } => {
                let kk = real::<T>(k.max(1) as f64);
                kk.powf(-*p)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BarrierSchedule::Geom { q } => {
                if *q <= T::zero() || *q >= T::one() {
                    return Err(Error::Config("geom schedule needs q in (0,1)".into()));
                }
            }
            BarrierSchedule::Power { p } => {
                if *p <= T::zero() {
                    return Err(Error::Config("power schedule needs p > 0".into()));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            BarrierSchedule::Geom { q } => format!("geom({})", q.as_f64()),
            BarrierSchedule::Power { p } => format!("power({})", p.as_f64()),
        }
    }
}

/// Computational budget of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "limit", rename_all = "kebab-case")]
pub enum Budget {
    Iterations(u64),
    Flops(u64),
    GradientEvaluations(u64),
    /// Effective dataset passes: total samples drawn divided by `N`.
    Epochs(f64),
}

impl Budget {
    pub fn kind_label(&self) -> &'static str {
        match self {
            Budget::Iterations(_) => "iterations",
            Budget::Flops(_) => "flops",
            Budget::GradientEvaluations(_) => "gradient-evaluations",
            Budget::Epochs(_) => "epochs",
        }
    }

    pub fn limit(&self) -> f64 {
        match self {
            Budget::Iterations(v) | Budget::Flops(v) | Budget::GradientEvaluations(v) => *v as f64,
            Budget::Epochs(v) => *v,
        }
    }

    /// Budget consumed so far, in this budget's unit.
    pub fn used(&self, totals: &Totals, n_data: Option<usize>) -> f64 {
        match self {
            Budget::Iterations(_) => totals.iterations as f64,
            Budget::Flops(_) => totals.flops as f64,
            Budget::GradientEvaluations(_) => totals.grad_samples as f64,
            Budget::Epochs(_) => {
                let n = n_data.expect("epoch budget requires a dataset") as f64;
                (totals.grad_samples + totals.value_samples + totals.hessian_samples) as f64 / n
            }
        }
    }

    pub fn exhausted(&self, totals: &Totals, n_data: Option<usize>) -> bool {
        self.used(totals, n_data) >= self.limit()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig<T: Scalar> {
    /// Acceptance-ratio and gate parameter.
    pub eta: T,
    /// Normal/tangential trust-region split.
    pub zeta: T,
    /// Fraction-to-boundary parameter.
    pub eps_s: T,
    /// Cauchy-fraction requirement on the tangential step.
    pub kappa_fcd: T,
    pub delta_max: T,
    /// Merit-parameter growth factor.
    pub rho: T,
    /// Radius/reliability update factor.
    pub gamma: T,
    pub delta0: T,
    pub eps_bar0: T,
    pub mu_bar0: T,
    pub barrier: BarrierSchedule<T>,
    /// Hard iteration cap, applied in addition to `budget`.
    pub max_iters: u64,
    pub budget: Budget,
    pub tol_rel_kkt: T,
    /// Slack initialization floor: `s⁽ⁱ⁾ = max{-h⁽ⁱ⁾(x₀), s_min}`.
    pub s_min: T,
    /// Safety cap of the merit-parameter loop.
    pub mu_cap: T,
    /// Record `‖Q‖` with the exact gradient even under noise (diagnostics;
    /// with zero noise it is always recorded since it equals `‖Q̄‖`).
    pub record_true_q: bool,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            eta: real(0.6),
            zeta: real(0.5),
            eps_s: real(0.9),
            kappa_fcd: T::one(),
            delta_max: real(10.0),
            rho: real(1.5),
            gamma: real(1.5),
            delta0: T::one(),
            eps_bar0: T::one(),
            mu_bar0: T::one(),
            barrier: BarrierSchedule::Geom { q: real(0.9999) },
            max_iters: 10_000_000,
            budget: Budget::Iterations(100_000),
            tol_rel_kkt: real(1e-4),
            s_min: real(1e-2),
            mu_cap: real(1e10),
            record_true_q: false,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: T| v > T::zero() && v < T::one();
        if !in_unit(self.eta) || !in_unit(self.zeta) || !in_unit(self.eps_s) {
            return Err(Error::Config("eta, zeta, eps_s must lie in (0,1)".into()));
        }
        if self.kappa_fcd <= T::zero() || self.kappa_fcd > T::one() {
            return Err(Error::Config("kappa_fcd must lie in (0,1]".into()));
        }
        if self.delta_max <= T::zero() {
            return Err(Error::Config("delta_max must be positive".into()));
        }
        if self.rho <= T::one() || self.gamma <= T::one() {
            return Err(Error::Config("rho and gamma must exceed 1".into()));
        }
        if self.delta0 <= T::zero() || self.delta0 > self.delta_max {
            return Err(Error::Config("delta0 must lie in (0, delta_max]".into()));
        }
        if self.eps_bar0 <= T::zero() || self.mu_bar0 <= T::zero() {
            return Err(Error::Config("eps_bar0 and mu_bar0 must be positive".into()));
        }
        if self.tol_rel_kkt <= T::zero() {
            return Err(Error::Config("tol_rel_kkt must be positive".into()));
        }
        if self.s_min <= T::zero() {
            return Err(Error::Config("s_min must be positive".into()));
        }
        if self.mu_cap <= self.mu_bar0 {
            return Err(Error::Config("mu_cap must exceed mu_bar0".into()));
        }
        self.barrier.validate()
    }
}

/// Fixed-sampling baseline parameters. `zeta` scales the radius generated
/// from `‖Q̄‖`, `delta_cap` bounds it, `beta` is the constant step-size-like
/// factor; these play different roles than the identically named adaptive
/// parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineConfig<T: Scalar> {
    pub zeta: T,
    pub delta_cap: T,
    pub mu_init: T,
    pub rho: T,
    pub beta: T,
    /// Use the literal (positive right-hand side) merit threshold instead of
    /// the decrease (negated) reading.
    pub literal_threshold: bool,
}

impl<T: Scalar> Default for BaselineConfig<T> {
    fn default() -> Self {
        BaselineConfig {
            zeta: real(10.0),
            delta_cap: real(10.0),
            mu_init: T::one(),
            rho: real(1.5),
            beta: real(0.5),
            literal_threshold: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverState<T: Scalar> {
    pub x: DVector<T>,
    pub s: DVector<T>,
    pub delta: T,
    pub eps_bar: T,
    pub merit: MeritState<T>,
    pub theta: T,
    pub k: u64,
    pub status: SolverStatus,
}

impl<T: Scalar> SolverState<T> {
    pub fn mu_bar(&self) -> T {
        self.merit.mu_bar
    }
}

/// Initial state: `x = x₀`, `s⁽ⁱ⁾ = max{-h⁽ⁱ⁾(x₀), s_min}` (relaxed
/// feasibility where possible, strict positivity always), `θ = θ₀`.
pub fn initialize<T: Scalar>(
    problem: &ProblemInstance<T>,
    cfg: &SolverConfig<T>,
) -> SolverState<T> {
    let x = problem.x0().clone();
    let h0 = problem.eval_h(&x);
    let s = DVector::from_fn(problem.dim_ineq(), |i, _| (-h0[i]).max(cfg.s_min));
    SolverState {
        x,
        s,
        delta: cfg.delta0,
        eps_bar: cfg.eps_bar0,
        merit: MeritState::new(cfg.mu_bar0, cfg.rho, cfg.mu_cap),
        theta: cfg.barrier.value(0),
        k: 0,
        status: SolverStatus::Running,
    }
}

fn stack_psi<T: Scalar>(g: &DVector<T>, theta: T, n: usize) -> DVector<T> {
    let d = g.len();
    let mut psi = DVector::zeros(d + n);
    psi.rows_mut(0, d).copy_from(g);
    for i in 0..n {
        psi[d + i] = -theta;
    }
    psi
}

/// One iteration of the adaptive method; advances `state` and returns the
/// iteration record. Callers own budget checks between iterations.
#[allow(clippy::too_many_arguments)]
pub fn iterate_once<T: Scalar>(
    state: &mut SolverState<T>,
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    cfg: &SolverConfig<T>,
    oracle_cfg: &OracleConfig<T>,
    hessian_model: &mut HessianModel<T>,
    stream_seed: u64,
    ref_scale: T,
    totals: &mut Totals,
) -> Result<IterationRecord> {
    debug_assert_eq!(state.status, SolverStatus::Running);
    let k = state.k;
    let theta = state.theta;
    let (d, m, n) = (problem.dim_x(), problem.dim_eq(), problem.dim_ineq());
    let (rows, cols) = (m + n, d + n);
    let mut flops = 0u64;

    let gest = estimate_gradient(problem, noise, &state.x, state.delta, oracle_cfg, stream_seed, k)?;
    totals.grad_samples += gest.batch_size as u64;

    let block = build_block(problem, &state.x, &state.s)?;
    flops += cost::block_factorization(rows, cols);

    let built = hessian_model.build(&HessianInputs {
        problem,
        noise,
        x: &state.x,
        s: &state.s,
        theta,
        g_bar: &gest.value,
        g_mat: &block.g_mat,
        j_mat: &block.j_mat,
        stream_seed,
        iteration: k,
    })?;
    totals.hessian_samples += built.samples as u64;
    flops += cost::hessian_build(hessian_model.kind(), d)
        + cost::spectral_norm(hessian_model.kind(), d);
    let hessian_norm = built.norm;
    let wbar = WBar::with_norm(built.matrix, built.norm, theta, n);

    let psi_bar = stack_psi(&gest.value, theta, n);
    let q_bar = block.stationarity_measure(&psi_bar);
    flops += cost::projection(rows, cols);
    let q_norm = q_bar.norm();
    let vartheta_norm = block.theta_vec.norm();

    let norm_q_true = if noise.is_exact() {
        Some(q_norm.as_f64())
    } else if cfg.record_true_q {
        let psi = stack_psi(&problem.eval_grad_f(&state.x), theta, n);
        Some(block.stationarity_measure(&psi).norm().as_f64())
    } else {
        None
    };

    let gate_ok = q_norm / T::one().max(wbar.norm()) >= cfg.eta * state.delta;

    let classification;
    let mut batch_f = 0u64;
    let mut step_norm = None;
    let mut gamma_bar = None;
    let mut lin_residual = None;
    let mut pred_out = None;
    let mut ared_out = None;
    let mut pred_threshold = None;
    let mut tangential_decrease = None;
    let mut cauchy_decrease = None;
    let mut slack_ratio_min = None;

    if !gate_ok {
        state.delta /= cfg.gamma;
        state.eps_bar /= cfg.gamma;
        classification = Classification::GateFailUnsuccessful;
    } else {
        let step = compute_step(
            &block,
            &wbar,
            &psi_bar,
            state.delta,
            cfg.zeta,
            cfg.eps_s,
            cfg.kappa_fcd,
        );
        flops += cost::projection(rows, cols) // normal step
            + step.cg_iterations as u64 * cost::cg_iteration(cols, rows, cols)
            + cost::projection(rows, cols) + (cols * cols) as u64; // cauchy point

        let resid = (&block.theta_vec + block.apply_a(&step.d_tilde)).norm();
        let model_term = psi_bar.dot(&step.d_tilde)
            + real::<T>(0.5) * step.d_tilde.dot(&wbar.apply(&step.d_tilde));
        let slope = resid - vartheta_norm;
        let roundoff = crate::merit::merit_roundoff_scale(
            model_term,
            state.merit.mu_bar * vartheta_norm,
            q_norm,
            state.delta,
        );
        let (mu_bar, pred) = merit_loop(
            &mut state.merit,
            q_norm,
            wbar.norm(),
            state.delta,
            cfg.eps_s,
            cfg.kappa_fcd,
            roundoff,
            |mu| model_term + mu * slope,
        )?;
        let threshold = merit_threshold(q_norm, wbar.norm(), state.delta, cfg.eps_s, cfg.kappa_fcd);

        let x_trial = &state.x + &step.dx;
        let s_trial = &state.s + &step.ds;
        let (f_cur, f_trial) = estimate_value_pair(
            problem,
            noise,
            &state.x,
            &x_trial,
            state.delta,
            state.eps_bar,
            oracle_cfg,
            stream_seed,
            k,
        )?;
        batch_f = f_cur.batch_size as u64;
        totals.value_samples += (f_cur.batch_size + f_trial.batch_size) as u64;

        let c_trial = problem.eval_c(&x_trial);
        let h_trial = problem.eval_h(&x_trial);
        let ared = actual_reduction(
            f_cur.value,
            f_trial.value,
            &state.s,
            &s_trial,
            &block.c,
            &block.h,
            &c_trial,
            &h_trial,
            theta,
            mu_bar,
        )?;

        step_norm = Some(step.d_tilde.norm().as_f64());
        gamma_bar = Some(step.gamma_bar.as_f64());
        lin_residual = Some(resid.as_f64());
        pred_out = Some(pred.as_f64());
        ared_out = Some(ared.as_f64());
        pred_threshold = Some(threshold.as_f64());
        tangential_decrease = Some(step.tangential_decrease.as_f64());
        cauchy_decrease = Some(step.cauchy_decrease.as_f64());

        // Ratio test Ared/Pred ≥ η in division-free form (Pred < 0 post-loop).
        if ared <= cfg.eta * pred {
            let mut ratio = T::max_value().unwrap();
            for i in 0..n {
                ratio = ratio.min(s_trial[i] / state.s[i]);
            }
            slack_ratio_min = Some(ratio.as_f64());
            state.x = x_trial;
            state.s = s_trial;
            state.delta = (cfg.gamma * state.delta).min(cfg.delta_max);
            if -pred >= state.eps_bar {
                state.eps_bar *= cfg.gamma;
                classification = Classification::Reliable;
            } else {
                state.eps_bar /= cfg.gamma;
                classification = Classification::Unreliable;
            }
        } else {
            state.delta /= cfg.gamma;
            state.eps_bar /= cfg.gamma;
            classification = Classification::RatioFailUnsuccessful;
        }
    }

    state.k += 1;
    state.theta = cfg.barrier.value(state.k);
    totals.iterations = state.k;
    totals.flops += flops;

    let rel_kkt = relative_kkt_residual(problem, &state.x, &state.s, state.theta, ref_scale)?;
    if rel_kkt <= cfg.tol_rel_kkt {
        state.status = SolverStatus::Converged;
    }

    Ok(IterationRecord {
        k,
        theta: theta.as_f64(),
        delta: state.delta.as_f64(),
        eps_bar: state.eps_bar.as_f64(),
        mu_bar: state.merit.mu_bar.as_f64(),
        batch_g: gest.batch_size as u64,
        batch_f,
        batch_h: built.samples as u64,
        norm_q_bar: q_norm.as_f64(),
        norm_q_true,
        rel_kkt: rel_kkt.as_f64(),
        classification,
        hessian_norm: hessian_norm.as_f64(),
        wbar_norm: wbar.norm().as_f64(),
        vartheta_norm: vartheta_norm.as_f64(),
        step_norm,
        gamma_bar,
        lin_residual,
        pred: pred_out,
        ared: ared_out,
        pred_threshold,
        tangential_decrease,
        cauchy_decrease,
        slack_ratio_min,
        flops,
    })
}

fn config_echo<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    cfg: &SolverConfig<T>,
    oracle_cfg: &OracleConfig<T>,
    hessian: HessianKind,
    seed: u64,
    algorithm: &str,
) -> serde_json::Value {
    json!({
        "algorithm": algorithm,
        "problem": problem.name(),
        "hessian": hessian.label(),
        "seed": seed,
        "noise": { "kind": noise.kind, "sigma2": noise.sigma2.as_f64(), "seed": noise.seed },
        "solver": {
            "eta": cfg.eta.as_f64(), "zeta": cfg.zeta.as_f64(), "eps_s": cfg.eps_s.as_f64(),
            "kappa_fcd": cfg.kappa_fcd.as_f64(), "delta_max": cfg.delta_max.as_f64(),
            "rho": cfg.rho.as_f64(), "gamma": cfg.gamma.as_f64(),
            "delta0": cfg.delta0.as_f64(), "eps_bar0": cfg.eps_bar0.as_f64(),
            "mu_bar0": cfg.mu_bar0.as_f64(), "barrier": cfg.barrier.label(),
            "max_iters": cfg.max_iters, "budget": { "kind": cfg.budget.kind_label(), "limit": cfg.budget.limit() },
            "tol_rel_kkt": cfg.tol_rel_kkt.as_f64(), "s_min": cfg.s_min.as_f64(),
            "mu_cap": cfg.mu_cap.as_f64(),
        },
        "oracle": {
            "kappa_g": oracle_cfg.kappa_g.as_f64(), "kappa_f": oracle_cfg.kappa_f.as_f64(),
            "p_g": oracle_cfg.p_g.as_f64(), "p_f": oracle_cfg.p_f.as_f64(),
            "c_g": oracle_cfg.c_g.as_f64(), "c_f": oracle_cfg.c_f.as_f64(),
            "max_batch": oracle_cfg.max_batch,
        },
    })
}

type Observer<'a, T> = &'a mut dyn FnMut(&SolverState<T>, &IterationRecord);

fn run_loop<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    cfg: &SolverConfig<T>,
    seed: u64,
    echo: serde_json::Value,
    mut iterate: impl FnMut(&mut SolverState<T>, u64, T, &mut Totals) -> Result<IterationRecord>,
    observer: Option<Observer<'_, T>>,
) -> Result<(SolverState<T>, RunTrace)> {
    cfg.validate()?;
    let n_data = problem.per_sample().map(|p| p.count);
    if matches!(cfg.budget, Budget::Epochs(_)) && n_data.is_none() {
        return Err(Error::Config(
            "epoch budget requires a problem with per-sample data".into(),
        ));
    }

    let mut state = initialize(problem, cfg);
    let stream_seed = combine(noise.seed, seed);
    let ref_scale = reference_scale(problem, &state.x, &state.s, state.theta)?;
    let mut totals = Totals::default();
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut observer = observer;

    let rel0 = relative_kkt_residual(problem, &state.x, &state.s, state.theta, ref_scale)?;
    totals.final_rel_kkt = rel0.as_f64();
    if rel0 <= cfg.tol_rel_kkt {
        state.status = SolverStatus::Converged;
    }

    while state.status == SolverStatus::Running {
        if state.k >= cfg.max_iters || cfg.budget.exhausted(&totals, n_data) {
            state.status = SolverStatus::BudgetExhausted;
            break;
        }
        match iterate(&mut state, stream_seed, ref_scale, &mut totals) {
            Ok(record) => {
                totals.final_rel_kkt = record.rel_kkt;
                if let Some(obs) = observer.as_mut() {
                    obs(&state, &record);
                }
                records.push(record);
            }
            Err(Error::SingularConstraint(_)) => {
                state.status = SolverStatus::Singular;
            }
            Err(Error::MeritDivergence { .. }) => {
                state.status = SolverStatus::MeritDivergence;
            }
            Err(e) => return Err(e),
        }
    }

    totals.budget_used = cfg.budget.used(&totals, n_data);
    let trace = RunTrace {
        config_echo: echo,
        records,
        status: state.status,
        totals,
    };
    Ok((state, trace))
}

/// Runs the adaptive method until convergence, budget exhaustion, or a
/// terminal error status. The whole run is a pure function of
/// `(problem, noise.seed, configs, seed)`.
pub fn solve<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    cfg: &SolverConfig<T>,
    oracle_cfg: &OracleConfig<T>,
    hessian: HessianKind,
    seed: u64,
) -> Result<(SolverState<T>, RunTrace)> {
    solve_with_observer(problem, noise, cfg, oracle_cfg, hessian, seed, None)
}

/// [`solve`] with a per-iteration observer (post-update state plus record);
/// used by diagnostic harnesses and invariant checks.
pub fn solve_with_observer<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    cfg: &SolverConfig<T>,
    oracle_cfg: &OracleConfig<T>,
    hessian: HessianKind,
    seed: u64,
    observer: Option<Observer<'_, T>>,
) -> Result<(SolverState<T>, RunTrace)> {
    oracle_cfg.validate(cfg)?;
    let mut model = HessianModel::new(hessian);
    let echo = config_echo(problem, noise, cfg, oracle_cfg, hessian, seed, "adaptive");
    run_loop(
        problem,
        noise,
        cfg,
        seed,
        echo,
        |state, stream_seed, ref_scale, totals| {
            iterate_once(
                state, problem, noise, cfg, oracle_cfg, &mut model, stream_seed, ref_scale, totals,
            )
        },
        observer,
    )
}

/// One iteration of the fixed-sampling baseline.
#[allow(clippy::too_many_arguments)]
fn baseline_iterate<T: Scalar>(
    state: &mut SolverState<T>,
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    cfg: &SolverConfig<T>,
    baseline: &BaselineConfig<T>,
    hessian_model: &mut HessianModel<T>,
    stream_seed: u64,
    ref_scale: T,
    totals: &mut Totals,
) -> Result<IterationRecord> {
    let k = state.k;
    let theta = state.theta;
    let (d, m, n) = (problem.dim_x(), problem.dim_eq(), problem.dim_ineq());
    let (rows, cols) = (m + n, d + n);
    let mut flops = 0u64;

    let gest = estimate_gradient_with_batch(problem, noise, &state.x, 1, stream_seed, k)?;
    totals.grad_samples += 1;

    let block = build_block(problem, &state.x, &state.s)?;
    flops += cost::block_factorization(rows, cols);

    let built = hessian_model.build(&HessianInputs {
        problem,
        noise,
        x: &state.x,
        s: &state.s,
        theta,
        g_bar: &gest.value,
        g_mat: &block.g_mat,
        j_mat: &block.j_mat,
        stream_seed,
        iteration: k,
    })?;
    totals.hessian_samples += built.samples as u64;
    flops += cost::hessian_build(hessian_model.kind(), d)
        + cost::spectral_norm(hessian_model.kind(), d);
    let hessian_norm = built.norm;
    let wbar = WBar::with_norm(built.matrix, built.norm, theta, n);

    let psi_bar = stack_psi(&gest.value, theta, n);
    let q_bar = block.stationarity_measure(&psi_bar);
    flops += cost::projection(rows, cols);
    let q_norm = q_bar.norm();
    let vartheta_norm = block.theta_vec.norm();

    // Radius generated from the stationarity measure.
    let delta = (baseline.beta * q_norm / baseline.zeta).min(baseline.beta * baseline.delta_cap);
    state.delta = delta;

    let mut step_norm = None;
    let mut gamma_bar = None;
    let mut lin_residual = None;
    let mut pred_out = None;
    let mut pred_threshold = None;
    let mut tangential_decrease = None;
    let mut cauchy_decrease = None;
    let mut slack_ratio_min = None;

    if delta > T::zero() {
        let step = compute_step(
            &block,
            &wbar,
            &psi_bar,
            delta,
            cfg.zeta,
            cfg.eps_s,
            cfg.kappa_fcd,
        );
        flops += cost::projection(rows, cols)
            + step.cg_iterations as u64 * cost::cg_iteration(cols, rows, cols)
            + cost::projection(rows, cols) + (cols * cols) as u64;

        let resid = (&block.theta_vec + block.apply_a(&step.d_tilde)).norm();
        let model_term = psi_bar.dot(&step.d_tilde)
            + real::<T>(0.5) * step.d_tilde.dot(&wbar.apply(&step.d_tilde));
        let slope = resid - vartheta_norm;

        let magnitude = q_norm * delta.min(cfg.eps_s)
            + real::<T>(0.5) * wbar.norm() * (delta * delta).min(cfg.eps_s * cfg.eps_s);
        let rhs = if baseline.literal_threshold {
            magnitude
        } else {
            -magnitude
        };
        // Best-effort μ̄ growth: the baseline never tests acceptance, so an
        // unreachable threshold (possible at near-feasible iterates under
        // the decrease reading) exits the loop instead of aborting the run.
        let roundoff = crate::merit::merit_roundoff_scale(
            model_term,
            state.merit.mu_bar * vartheta_norm,
            q_norm,
            delta,
        );
        let (mu_bar, pred) = merit_loop_with_threshold(
            &mut state.merit,
            rhs,
            |mu| model_term + mu * slope,
            roundoff,
            false,
        )?;
        let _ = mu_bar;

        let x_trial = &state.x + &step.dx;
        let s_trial = &state.s + &step.ds;
        let mut ratio = T::max_value().unwrap();
        for i in 0..n {
            ratio = ratio.min(s_trial[i] / state.s[i]);
        }
        slack_ratio_min = Some(ratio.as_f64());
        step_norm = Some(step.d_tilde.norm().as_f64());
        gamma_bar = Some(step.gamma_bar.as_f64());
        lin_residual = Some(resid.as_f64());
        pred_out = Some(pred.as_f64());
        pred_threshold = Some(rhs.as_f64());
        tangential_decrease = Some(step.tangential_decrease.as_f64());
        cauchy_decrease = Some(step.cauchy_decrease.as_f64());

        // The iterate is always updated.
        state.x = x_trial;
        state.s = s_trial;
    }

    state.k += 1;
    state.theta = cfg.barrier.value(state.k);
    totals.iterations = state.k;
    totals.flops += flops;

    let rel_kkt = relative_kkt_residual(problem, &state.x, &state.s, state.theta, ref_scale)?;
    if rel_kkt <= cfg.tol_rel_kkt {
        state.status = SolverStatus::Converged;
    }

    Ok(IterationRecord {
        k,
        theta: theta.as_f64(),
        delta: delta.as_f64(),
        eps_bar: state.eps_bar.as_f64(),
        mu_bar: state.merit.mu_bar.as_f64(),
        batch_g: 1,
        batch_f: 0,
        batch_h: built.samples as u64,
        norm_q_bar: q_norm.as_f64(),
        norm_q_true: if noise.is_exact() {
            Some(q_norm.as_f64())
        } else {
            None
        },
        rel_kkt: rel_kkt.as_f64(),
        // The baseline applies every step; records classify as reliable.
        classification: Classification::Reliable,
        hessian_norm: hessian_norm.as_f64(),
        wbar_norm: wbar.norm().as_f64(),
        vartheta_norm: vartheta_norm.as_f64(),
        step_norm,
        gamma_bar,
        lin_residual,
        pred: pred_out,
        ared: None,
        pred_threshold,
        tangential_decrease,
        cauchy_decrease,
        slack_ratio_min,
        flops,
    })
}

/// Fixed-sampling baseline: one gradient sample per iteration, no objective
/// value estimates, the iterate is always updated.
pub fn solve_fully_stochastic<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    cfg: &SolverConfig<T>,
    baseline: &BaselineConfig<T>,
    hessian: HessianKind,
    seed: u64,
) -> Result<(SolverState<T>, RunTrace)> {
    solve_fully_stochastic_with_observer(problem, noise, cfg, baseline, hessian, seed, None)
}

/// [`solve_fully_stochastic`] with a per-iteration observer.
pub fn solve_fully_stochastic_with_observer<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    cfg: &SolverConfig<T>,
    baseline: &BaselineConfig<T>,
    hessian: HessianKind,
    seed: u64,
    observer: Option<Observer<'_, T>>,
) -> Result<(SolverState<T>, RunTrace)> {
    if baseline.zeta <= T::zero()
        || baseline.delta_cap <= T::zero()
        || baseline.beta <= T::zero()
        || baseline.mu_init <= T::zero()
        || baseline.rho <= T::one()
    {
        return Err(Error::Config("invalid baseline parameters".into()));
    }
    let mut model = HessianModel::new(hessian);
    let oracle_echo = OracleConfig::<T>::default();
    let mut echo = config_echo(problem, noise, cfg, &oracle_echo, hessian, seed, "fixed");
    echo["baseline"] = json!({
        "zeta": baseline.zeta.as_f64(),
        "delta_cap": baseline.delta_cap.as_f64(),
        "mu_init": baseline.mu_init.as_f64(),
        "rho": baseline.rho.as_f64(),
        "beta": baseline.beta.as_f64(),
        "literal_threshold": baseline.literal_threshold,
    });
    let baseline_cfg = *baseline;

    let result = run_loop(
        problem,
        noise,
        cfg,
        seed,
        echo,
        |state, stream_seed, ref_scale, totals| {
            if state.k == 0 {
                state.merit = MeritState::new(baseline_cfg.mu_init, baseline_cfg.rho, cfg.mu_cap);
            }
            baseline_iterate(
                state,
                problem,
                noise,
                cfg,
                &baseline_cfg,
                &mut model,
                stream_seed,
                ref_scale,
                totals,
            )
        },
        observer,
    )?;
    Ok(result)
}
