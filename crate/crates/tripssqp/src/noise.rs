//! Noise layered on top of deterministic problem evaluators.
//!
//! Two mechanisms are supported. `Gaussian` perturbs exact evaluations:
//! value draws follow `N(f, σ²)`, gradient draws follow `N(∇f, σ²(I+𝟙𝟙ᵀ))`,
//! and the `(i,j)`/`(j,i)` entries of a Hessian draw share one `N((∇²f)ᵢⱼ, σ²)`
//! sample. `Subsample` averages per-sample evaluators over mini-batches drawn
//! uniformly with replacement from the dataset behind the problem.
//!
//! With `σ² = 0` the Gaussian model returns the deterministic values bitwise
//! unchanged and consumes no randomness.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// Gaussian perturbation of exact evaluations.
    Gaussian,
    /// Mini-batch averages over the problem's dataset (with replacement).
    Subsample,
}

#[derive(Debug, Clone, Copy)]
pub struct NoiseModel<T: Scalar> {
    /// Variance of the Gaussian model; ignored by `Subsample`.
    pub sigma2: T,
    pub kind: NoiseKind,
    pub seed: u64,
}

impl<T: Scalar> NoiseModel<T> {
    pub fn gaussian(sigma2: T, seed: u64) -> Self {
        NoiseModel {
            sigma2,
            kind: NoiseKind::Gaussian,
            seed,
        }
    }

    /// Exact evaluations (Gaussian with zero variance).
    pub fn exact() -> Self {
        NoiseModel {
            sigma2: T::zero(),
            kind: NoiseKind::Gaussian,
            seed: 0,
        }
    }

    pub fn subsample(seed: u64) -> Self {
        NoiseModel {
            sigma2: T::zero(),
            kind: NoiseKind::Subsample,
            seed,
        }
    }

    /// True when estimates coincide with the deterministic evaluators.
    pub fn is_exact(&self) -> bool {
        self.kind == NoiseKind::Gaussian && self.sigma2 == T::zero()
    }
}
