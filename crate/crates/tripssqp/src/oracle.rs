//! Probabilistic zeroth- and first-order oracles via adaptive-batch sample
//! averaging.
//!
//! Batch sizes follow
//!
//! ```text
//! |ξᵍ| = C_g / (p_g κ_g² Δ²)          (gradient)
//! |ξᶠ| = C_f / min{p_f κ_f² Δ⁴, ε̄²}   (objective values)
//! ```
//!
//! rounded up and clamped to `[1, max_batch]`. For the Gaussian noise model
//! the average of `B` independent draws is itself Gaussian with variance
//! divided by `B`, so the estimate is drawn in one shot from the averaged
//! distribution; the subsampling model averages per-sample evaluations over
//! `B` indices drawn uniformly with replacement. Within one iteration the
//! two value estimates use independent streams.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{NoiseKind, NoiseModel};
use crate::problem::ProblemInstance;
use crate::rng::{stream, StreamDomain};
use crate::scalar::{real, real_usize, Scalar};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig<T: Scalar> {
    pub kappa_g: T,
    pub kappa_f: T,
    pub p_g: T,
    pub p_f: T,
    pub c_g: T,
    pub c_f: T,
    /// Cap on every batch size (numerical-stability bound).
    pub max_batch: usize,
}

impl<T: Scalar> Default for OracleConfig<T> {
    fn default() -> Self {
        OracleConfig {
            kappa_g: real(0.01),
            kappa_f: real(0.0005),
            p_g: real(0.05),
            p_f: real(0.05),
            c_g: real(5.0),
            c_f: real(5.0),
            max_batch: 10_000,
        }
    }
}

impl<T: Scalar> OracleConfig<T> {
    /// Range checks plus the coupling bound
    /// `κ_f ≤ κ_fcd ε_s η³ / (16 max{1, Δ_max})`.
    pub fn validate(&self, solver: &SolverConfig<T>) -> Result<()> {
        let in_unit = |v: T| v > T::zero() && v < T::one();
        if !in_unit(self.p_g) || !in_unit(self.p_f) {
            return Err(Error::Config("p_g, p_f must lie in (0,1)".into()));
        }
        if self.kappa_g <= T::zero() || self.kappa_f <= T::zero() {
            return Err(Error::Config("kappa_g, kappa_f must be positive".into()));
        }
        if self.c_g <= T::zero() || self.c_f <= T::zero() {
            return Err(Error::Config("C_g, C_f must be positive".into()));
        }
        if self.max_batch == 0 {
            return Err(Error::Config("max_batch must be at least 1".into()));
        }
        let eta3 = solver.eta * solver.eta * solver.eta;
        let bound = solver.kappa_fcd * solver.eps_s * eta3
            / (real::<T>(16.0) * T::one().max(solver.delta_max));
        if self.kappa_f > bound {
            return Err(Error::Config(format!(
                "kappa_f = {} exceeds kappa_fcd*eps_s*eta^3/(16 max(1,delta_max)) = {}",
                self.kappa_f.as_f64(),
                bound.as_f64()
            )));
        }
        Ok(())
    }
}

fn clamp_batch(raw: f64, max_batch: usize) -> usize {
    if !raw.is_finite() || raw >= max_batch as f64 {
        max_batch
    } else if raw <= 1.0 {
        1
    } else {
        (raw.ceil() as usize).min(max_batch)
    }
}

/// Gradient batch size `⌈C_g/(p_g κ_g² Δ²)⌉` clamped to `[1, max_batch]`.
pub fn gradient_batch_size<T: Scalar>(delta: T, cfg: &OracleConfig<T>) -> usize {
    let d = delta.as_f64();
    let raw = cfg.c_g.as_f64() / (cfg.p_g.as_f64() * cfg.kappa_g.as_f64().powi(2) * d * d);
    clamp_batch(raw, cfg.max_batch)
}

/// Value batch size `⌈C_f/min{p_f κ_f² Δ⁴, ε̄²}⌉` clamped to `[1, max_batch]`.
pub fn value_batch_size<T: Scalar>(delta: T, eps_bar: T, cfg: &OracleConfig<T>) -> usize {
    let d = delta.as_f64();
    let e = eps_bar.as_f64();
    let denom = (cfg.p_f.as_f64() * cfg.kappa_f.as_f64().powi(2) * d.powi(4)).min(e * e);
    clamp_batch(cfg.c_f.as_f64() / denom, cfg.max_batch)
}

/// An oracle output together with the batch size that produced it.
#[derive(Debug, Clone)]
pub struct OracleEstimate<V> {
    pub value: V,
    pub batch_size: usize,
}

fn subsample_indices<R: Rng>(rng: &mut R, n: usize, batch: usize) -> Vec<usize> {
    (0..batch).map(|_| rng.random_range(0..n)).collect()
}

fn require_per_sample<'a, T: Scalar>(
    problem: &'a ProblemInstance<T>,
) -> Result<&'a crate::problem::PerSampleEvals<T>> {
    problem.per_sample().ok_or_else(|| {
        Error::Config(format!(
            "problem '{}' has no per-sample evaluators for subsampling",
            problem.name()
        ))
    })
}

/// Gradient estimate with an explicit batch size.
pub fn estimate_gradient_with_batch<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    x: &DVector<T>,
    batch: usize,
    stream_seed: u64,
    iteration: u64,
) -> Result<OracleEstimate<DVector<T>>> {
    let mut rng = stream(stream_seed, iteration, StreamDomain::GradientSample);
    let value = match noise.kind {
        NoiseKind::Gaussian => {
            let exact = problem.eval_grad_f(x);
            if noise.sigma2 == T::zero() {
                exact
            } else {
                // Mean of B draws from N(∇f, σ²(I+𝟙𝟙ᵀ)) is N(∇f, σ²(I+𝟙𝟙ᵀ)/B):
                // realized as ∇f + (σ/√B)(z + ξ𝟙) with fresh standard normals.
                let scale = (noise.sigma2 / real_usize::<T>(batch)).sqrt();
                let shared: T = real(rng.sample::<f64, _>(StandardNormal));
                DVector::from_fn(exact.len(), |i, _| {
                    let z: T = real(rng.sample::<f64, _>(StandardNormal));
                    exact[i] + scale * (z + shared)
                })
            }
        }
        NoiseKind::Subsample => {
            let per = require_per_sample(problem)?;
            let mut acc = DVector::<T>::zeros(problem.dim_x());
            for i in subsample_indices(&mut rng, per.count, batch) {
                acc += (per.grad)(x, i);
            }
            acc / real_usize::<T>(batch)
        }
    };
    for v in value.iter() {
        if !v.finite() {
            return Err(Error::NonFinite("gradient estimate"));
        }
    }
    Ok(OracleEstimate {
        value,
        batch_size: batch,
    })
}

/// First-order oracle: batch size from the Δ-rule, then a sample average.
/// With zero noise the estimate equals `∇f(x)` exactly.
pub fn estimate_gradient<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    x: &DVector<T>,
    delta: T,
    cfg: &OracleConfig<T>,
    stream_seed: u64,
    iteration: u64,
) -> Result<OracleEstimate<DVector<T>>> {
    let batch = gradient_batch_size(delta, cfg);
    estimate_gradient_with_batch(problem, noise, x, batch, stream_seed, iteration)
}

fn estimate_value_at<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    x: &DVector<T>,
    batch: usize,
    stream_seed: u64,
    iteration: u64,
    domain: StreamDomain,
) -> Result<T> {
    let mut rng = stream(stream_seed, iteration, domain);
    let value = match noise.kind {
        NoiseKind::Gaussian => {
            let exact = problem.eval_f(x);
            if noise.sigma2 == T::zero() {
                exact
            } else {
                let scale = (noise.sigma2 / real_usize::<T>(batch)).sqrt();
                let z: T = real(rng.sample::<f64, _>(StandardNormal));
                exact + scale * z
            }
        }
        NoiseKind::Subsample => {
            let per = require_per_sample(problem)?;
            let mut acc = T::zero();
            for i in subsample_indices(&mut rng, per.count, batch) {
                acc += (per.value)(x, i);
            }
            acc / real_usize::<T>(batch)
        }
    };
    if !value.finite() {
        return Err(Error::NonFinite("value estimate"));
    }
    Ok(value)
}

/// Zeroth-order oracle: value estimates at the current and trial points,
/// each a sample average over `value_batch_size` draws from independent
/// streams (estimates at the same point in the same iteration do not share
/// randomness).
#[allow(clippy::too_many_arguments)]
pub fn estimate_value_pair<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    x: &DVector<T>,
    x_trial: &DVector<T>,
    delta: T,
    eps_bar: T,
    cfg: &OracleConfig<T>,
    stream_seed: u64,
    iteration: u64,
) -> Result<(OracleEstimate<T>, OracleEstimate<T>)> {
    let batch = value_batch_size(delta, eps_bar, cfg);
    let current = estimate_value_at(
        problem,
        noise,
        x,
        batch,
        stream_seed,
        iteration,
        StreamDomain::ValueCurrent,
    )?;
    let trial = estimate_value_at(
        problem,
        noise,
        x_trial,
        batch,
        stream_seed,
        iteration,
        StreamDomain::ValueTrial,
    )?;
    Ok((
        OracleEstimate {
            value: current,
            batch_size: batch,
        },
        OracleEstimate {
            value: trial,
            batch_size: batch,
        },
    ))
}

/// One sampled objective Hessian (used by the EstH/AveH constructions).
pub fn sample_hessian<T: Scalar>(
    problem: &ProblemInstance<T>,
    noise: &NoiseModel<T>,
    x: &DVector<T>,
    stream_seed: u64,
    iteration: u64,
) -> Result<DMatrix<T>> {
    let mut rng = stream(stream_seed, iteration, StreamDomain::HessianSample);
    let h = match noise.kind {
        NoiseKind::Gaussian => {
            let mut exact = problem
                .eval_hess_f(x)
                .ok_or_else(|| Error::MissingHessian(problem.name().to_string()))?;
            if noise.sigma2 > T::zero() {
                let sigma = noise.sigma2.sqrt();
                for i in 0..exact.nrows() {
                    for j in i..exact.ncols() {
                        let z: T = real(rng.sample::<f64, _>(StandardNormal));
                        exact[(i, j)] += sigma * z;
                        if j != i {
                            exact[(j, i)] = exact[(i, j)];
                        }
                    }
                }
            }
            exact
        }
        NoiseKind::Subsample => {
            let per = require_per_sample(problem)?;
            let hess = per.hess.as_ref().ok_or_else(|| {
                Error::MissingHessian(problem.name().to_string())
            })?;
            let i = rng.random_range(0..per.count);
            hess(x, i)
        }
    };
    for v in h.iter() {
        if !v.finite() {
            return Err(Error::NonFinite("hessian sample"));
        }
    }
    Ok(h)
}
