//! Hessian approximations `H̄` and the block operator `W̄ = diag(H̄, θI)`.
//!
//! Four constructions are supported:
//!
//! * `Id` — identity.
//! * `Sr1` — symmetric rank-one updates of the sampled Lagrangian gradient,
//!   skipped when the curvature denominator is numerically tiny; state is
//!   only advanced when the iterate actually moved.
//! * `EstH` — one sampled objective Hessian plus the exact constraint
//!   curvature `Σ λ̄⁽ⁱ⁾∇²c⁽ⁱ⁾ + Σ τ⁽ⁱ⁾∇²h⁽ⁱ⁾` with `τ = θS⁻¹𝟙` and λ̄ from
//!   the estimated-gradient multiplier formula.
//! * `AveH` — mean of the most recent (up to 50) `EstH`-style samples.
//!
//! No positive-definiteness modification is applied anywhere; the
//! trust-region machinery accepts indefinite models.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kkt::multipliers_from_gradient;
use crate::noise::NoiseModel;
use crate::oracle::sample_hessian;
use crate::problem::ProblemInstance;
use crate::scalar::{real, real_usize, Scalar};

/// Window length of the averaged-Hessian construction.
pub const AVEH_WINDOW: usize = 50;

/// Relative skip threshold of the SR1 update.
const SR1_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HessianKind {
    Id,
    Sr1,
    EstH,
    AveH,
}

impl HessianKind {
    pub fn label(self) -> &'static str {
        match self {
            HessianKind::Id => "id",
            HessianKind::Sr1 => "sr1",
            HessianKind::EstH => "esth",
            HessianKind::AveH => "aveh",
        }
    }
}

impl std::str::FromStr for HessianKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "id" => Ok(HessianKind::Id),
            "sr1" => Ok(HessianKind::Sr1),
            "esth" => Ok(HessianKind::EstH),
            "aveh" => Ok(HessianKind::AveH),
            other => Err(Error::Config(format!("unknown hessian kind '{other}'"))),
        }
    }
}

struct Sr1State<T: Scalar> {
    h: DMatrix<T>,
    prev_x: DVector<T>,
    prev_grad_l: DVector<T>,
}

/// Per-run mutable Hessian-model state. One instance per solver run; not
/// shared across threads.
pub struct HessianModel<T: Scalar> {
    kind: HessianKind,
    sr1: Option<Sr1State<T>>,
    buffer: VecDeque<DMatrix<T>>,
}

/// Inputs for one Hessian construction at the current iterate.
pub struct HessianInputs<'a, T: Scalar> {
    pub problem: &'a ProblemInstance<T>,
    pub noise: &'a NoiseModel<T>,
    pub x: &'a DVector<T>,
    pub s: &'a DVector<T>,
    pub theta: T,
    pub g_bar: &'a DVector<T>,
    pub g_mat: &'a DMatrix<T>,
    pub j_mat: &'a DMatrix<T>,
    /// Combined stream seed of the run (noise seed already mixed in).
    pub stream_seed: u64,
    pub iteration: u64,
}

/// A built `H̄` with its exact spectral norm and the number of objective
/// Hessian samples drawn.
pub struct BuiltHessian<T: Scalar> {
    pub matrix: DMatrix<T>,
    pub norm: T,
    pub samples: usize,
}

/// Exact spectral norm of a symmetric matrix via a dense eigensolve.
pub fn symmetric_spectral_norm<T: Scalar>(mat: &DMatrix<T>) -> T {
    if mat.nrows() == 0 {
        return T::zero();
    }
    let eig = mat.clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .fold(T::zero(), |acc, ev| acc.max(ev.abs()))
}

fn symmetrize<T: Scalar>(mat: &mut DMatrix<T>) {
    let half = real::<T>(0.5);
    for i in 0..mat.nrows() {
        for j in (i + 1)..mat.ncols() {
            let v = (mat[(i, j)] + mat[(j, i)]) * half;
            mat[(i, j)] = v;
            mat[(j, i)] = v;
        }
    }
}

impl<T: Scalar> HessianModel<T> {
    pub fn new(kind: HessianKind) -> Self {
        HessianModel {
            kind,
            sr1: None,
            buffer: VecDeque::new(),
        }
    }

    pub fn kind(&self) -> HessianKind {
        self.kind
    }

    /// Sampled Lagrangian Hessian used by `EstH` and `AveH`.
    fn sampled_lagrangian_hessian(&self, inp: &HessianInputs<'_, T>) -> Result<DMatrix<T>> {
        let d = inp.problem.dim_x();
        let mut h = sample_hessian(
            inp.problem,
            inp.noise,
            inp.x,
            inp.stream_seed,
            inp.iteration,
        )?;
        let (lambda, tau) =
            multipliers_from_gradient(inp.g_bar, inp.g_mat, inp.j_mat, inp.s, inp.theta)?;
        for i in 0..inp.problem.dim_eq() {
            let hc = inp
                .problem
                .eval_hess_c(inp.x, i)
                .ok_or_else(|| Error::MissingHessian(inp.problem.name().to_string()))?;
            h += hc * lambda[i];
        }
        for i in 0..inp.problem.dim_ineq() {
            let hh = inp
                .problem
                .eval_hess_h(inp.x, i)
                .ok_or_else(|| Error::MissingHessian(inp.problem.name().to_string()))?;
            h += hh * tau[i];
        }
        debug_assert_eq!(h.nrows(), d);
        symmetrize(&mut h);
        Ok(h)
    }

    /// Estimated Lagrangian gradient `ḡ + Gᵀλ̄ + Jᵀτ` used by SR1.
    fn sampled_lagrangian_gradient(&self, inp: &HessianInputs<'_, T>) -> Result<DVector<T>> {
        let (lambda, tau) =
            multipliers_from_gradient(inp.g_bar, inp.g_mat, inp.j_mat, inp.s, inp.theta)?;
        Ok(inp.g_bar + inp.g_mat.transpose() * lambda + inp.j_mat.transpose() * tau)
    }

    /// Builds `H̄` for the current iterate and advances internal state.
    pub fn build(&mut self, inp: &HessianInputs<'_, T>) -> Result<BuiltHessian<T>> {
        let d = inp.problem.dim_x();
        match self.kind {
            HessianKind::Id => Ok(BuiltHessian {
                matrix: DMatrix::identity(d, d),
                norm: T::one(),
                samples: 0,
            }),
            HessianKind::Sr1 => {
                let grad_l = self.sampled_lagrangian_gradient(inp)?;
                match &mut self.sr1 {
                    None => {
                        self.sr1 = Some(Sr1State {
                            h: DMatrix::identity(d, d),
                            prev_x: inp.x.clone(),
                            prev_grad_l: grad_l,
                        });
                    }
                    Some(state) => {
                        if state.prev_x != *inp.x {
                            let dx = inp.x - &state.prev_x;
                            let y = &grad_l - &state.prev_grad_l;
                            let u = &y - &state.h * &dx;
                            let denom = u.dot(&dx);
                            if denom.abs() >= real::<T>(SR1_GUARD) * u.norm() * dx.norm() {
                                let scale = T::one() / denom;
                                state.h += (&u * u.transpose()) * scale;
                                symmetrize(&mut state.h);
                            }
                            state.prev_x = inp.x.clone();
                            state.prev_grad_l = grad_l;
                        }
                        // Same iterate (unsuccessful step): state untouched.
                    }
                }
                let h = self.sr1.as_ref().expect("initialized above").h.clone();
                let norm = symmetric_spectral_norm(&h);
                Ok(BuiltHessian {
                    matrix: h,
                    norm,
                    samples: 0,
                })
            }
            HessianKind::EstH => {
                let h = self.sampled_lagrangian_hessian(inp)?;
                let norm = symmetric_spectral_norm(&h);
                Ok(BuiltHessian {
                    matrix: h,
                    norm,
                    samples: 1,
                })
            }
            HessianKind::AveH => {
                let h = self.sampled_lagrangian_hessian(inp)?;
                self.buffer.push_back(h);
                if self.buffer.len() > AVEH_WINDOW {
                    self.buffer.pop_front();
                }
                let mut avg = DMatrix::<T>::zeros(d, d);
                for m in &self.buffer {
                    avg += m;
                }
                avg /= real_usize::<T>(self.buffer.len());
                let norm = symmetric_spectral_norm(&avg);
                Ok(BuiltHessian {
                    matrix: avg,
                    norm,
                    samples: 1,
                })
            }
        }
    }
}

/// Block-diagonal operator `W̄ = diag(H̄, θI)` with its exact operator norm.
pub struct WBar<T: Scalar> {
    h: DMatrix<T>,
    theta: T,
    norm: T,
    dim_ineq: usize,
}

impl<T: Scalar> WBar<T> {
    /// Assembles `W̄` computing `‖H̄‖₂` by a dense symmetric eigensolve.
    pub fn assemble(h: DMatrix<T>, theta: T, dim_ineq: usize) -> Self {
        let h_norm = symmetric_spectral_norm(&h);
        Self::with_norm(h, h_norm, theta, dim_ineq)
    }

    /// Assembles `W̄` from a Hessian whose spectral norm is already known.
    pub fn with_norm(h: DMatrix<T>, h_norm: T, theta: T, dim_ineq: usize) -> Self {
        assert!(theta > T::zero());
        WBar {
            h,
            theta,
            norm: h_norm.max(theta),
            dim_ineq,
        }
    }

    /// `v ↦ (H̄ v_x ; θ v_s)`.
    pub fn apply(&self, v: &DVector<T>) -> DVector<T> {
        let d = self.h.nrows();
        let vx = v.rows(0, d);
        let mut out = DVector::zeros(v.len());
        out.rows_mut(0, d).copy_from(&(&self.h * vx));
        for i in 0..self.dim_ineq {
            out[d + i] = self.theta * v[d + i];
        }
        out
    }

    /// Exact operator norm `max{‖H̄‖₂, θ}`.
    pub fn norm(&self) -> T {
        self.norm
    }

    pub fn h(&self) -> &DMatrix<T> {
        &self.h
    }

    pub fn theta(&self) -> T {
        self.theta
    }
}
