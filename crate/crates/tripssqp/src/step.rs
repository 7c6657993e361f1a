//! Trial-step computation for the rescaled trust-region subproblem.
//!
//! The rescaled step `d̃ = (Δx; S⁻¹Δs)` splits into a normal component
//! `w̃ = γ̄ v` with `v = -Aᵀ[A Aᵀ]⁻¹ϑ` (range of `Aᵀ`, reduces linearized
//! infeasibility) and a tangential component `t̃ ∈ ker(A)` that reduces the
//! quadratic model
//!
//! ```text
//! m(t) = ½ tᵀ W̄ t + (ψ̄ + γ̄ W̄ v)ᵀ t
//! ```
//!
//! inside the leftover radius `Δ̂ = √(Δ² - ‖w̃‖²)` subject to the
//! fraction-to-boundary bounds on the slack part. The tangential solve is a
//! Steihaug-type projected CG; if the final (possibly truncated) iterate
//! fails the Cauchy-fraction bound it falls back to the Cauchy point at the
//! strengthened radius `min{Δ̂, ε_s - ‖w̃ˢ‖}`, which is feasible by
//! construction.

use nalgebra::DVector;

use crate::hessian::WBar;
use crate::kkt::ConstraintBlock;
use crate::scalar::{real, Scalar};

/// Relative CG residual tolerance.
const CG_TOL: f64 = 1e-10;

/// Computed rescaled trial step with its quality certificates.
#[derive(Debug, Clone)]
pub struct StepResult<T: Scalar> {
    pub dx: DVector<T>,
    /// Unscaled slack step `Δs = S d̃ˢ`.
    pub ds: DVector<T>,
    /// Rescaled slack step `d̃ˢ = S⁻¹Δs`.
    pub ds_tilde: DVector<T>,
    pub d_tilde: DVector<T>,
    pub w_tilde: DVector<T>,
    pub t_tilde: DVector<T>,
    pub gamma_bar: T,
    /// Model decrease `m(t̃) - m(0)` of the tangential step; `≤ 0`.
    pub tangential_decrease: T,
    /// Cauchy-point decrease at the strengthened radius; `≤ 0`.
    pub cauchy_decrease: T,
    /// Strengthened radius `min{Δ̂, ε_s - ‖w̃ˢ‖}` used for the Cauchy point.
    pub radius_eff: T,
    pub delta_hat: T,
    pub used_cauchy_fallback: bool,
    pub cg_iterations: usize,
}

/// Minimum-norm solution of `ϑ + A v = 0`.
pub fn normal_step<T: Scalar>(block: &ConstraintBlock<T>) -> DVector<T> {
    let y = block.solve_aat(&block.theta_vec);
    -block.apply_at(&y)
}

/// Scaling `γ̄ = min{ζ ε_s/‖ṽˢ‖, ζ Δ/‖v‖, 1}`; zero-norm denominators drop
/// their term from the minimum.
pub fn normal_scaling<T: Scalar>(
    v: &DVector<T>,
    v_slack: &DVector<T>,
    delta: T,
    zeta: T,
    eps_s: T,
) -> T {
    let mut gamma = T::one();
    let vs_norm = v_slack.norm();
    if vs_norm > T::zero() {
        gamma = gamma.min(zeta * eps_s / vs_norm);
    }
    let v_norm = v.norm();
    if v_norm > T::zero() {
        gamma = gamma.min(zeta * delta / v_norm);
    }
    gamma
}

/// Model decrease `m(t) - m(0) = ½ tᵀ W̄ t + rhsᵀ t`.
pub fn model_decrease<T: Scalar>(w: &WBar<T>, rhs: &DVector<T>, t: &DVector<T>) -> T {
    real::<T>(0.5) * t.dot(&w.apply(t)) + rhs.dot(t)
}

/// Cauchy point of the tangential model within `radius_eff`: the exact 1-d
/// minimizer along the projected steepest descent direction, clipped to the
/// ball. Returns `(t_c, m(t_c) - m(0))`.
pub fn cauchy_point<T: Scalar>(
    block: &ConstraintBlock<T>,
    w: &WBar<T>,
    rhs: &DVector<T>,
    radius_eff: T,
) -> (DVector<T>, T) {
    let g0 = block.project_nullspace(rhs);
    let g_norm = g0.norm();
    if g_norm == T::zero() || radius_eff <= T::zero() {
        return (DVector::zeros(rhs.len()), T::zero());
    }
    let curvature = g0.dot(&w.apply(&g0));
    let slope = rhs.dot(&g0); // equals ‖g0‖² up to projector roundoff
    let alpha_max = radius_eff / g_norm;
    let alpha = if curvature > T::zero() {
        (slope / curvature).min(alpha_max)
    } else {
        alpha_max
    };
    let t = -&g0 * alpha;
    let decrease = real::<T>(0.5) * alpha * alpha * curvature - alpha * slope;
    (t, decrease)
}

/// Positive root of `‖t + τ d‖ = radius`.
fn boundary_intersection<T: Scalar>(t: &DVector<T>, d: &DVector<T>, radius: T) -> T {
    let td = t.dot(d);
    let dd = d.norm_squared();
    let residual = radius * radius - t.norm_squared();
    if dd == T::zero() {
        return T::zero();
    }
    ((td * td + dd * residual.max(T::zero())).sqrt() - td) / dd
}

/// Largest `β ∈ (0, 1]` with `(β t)ˢ ≥ -ε_s 𝟙 - w̃ˢ` elementwise.
fn fraction_to_boundary_scale<T: Scalar>(
    t: &DVector<T>,
    dim_x: usize,
    eps_s: T,
    w_tilde_s: &DVector<T>,
) -> T {
    let mut beta = T::one();
    for i in 0..w_tilde_s.len() {
        let ti = t[dim_x + i];
        let bound = -eps_s - w_tilde_s[i];
        if ti < bound {
            // bound < 0 (since ‖w̃ˢ‖ ≤ ζ ε_s < ε_s), so the ratio is in (0,1).
            beta = beta.min(bound / ti);
        }
    }
    beta
}

/// Approximately solves the tangential subproblem by projected CG with a
/// Cauchy safeguard. Returns `(t̃, decrease, cauchy_decrease, radius_eff,
/// fallback_used, cg_iterations)`.
#[allow(clippy::too_many_arguments)]
pub fn tangential_step<T: Scalar>(
    block: &ConstraintBlock<T>,
    w: &WBar<T>,
    rhs: &DVector<T>,
    delta_hat: T,
    eps_s: T,
    w_tilde_s: &DVector<T>,
    kappa_fcd: T,
) -> (DVector<T>, T, T, T, bool, usize) {
    let dim = rhs.len();
    let dim_x = block.dim_x();
    let radius_eff = delta_hat.min(eps_s - w_tilde_s.norm());
    let (t_cauchy, dec_cauchy) = cauchy_point(block, w, rhs, radius_eff);

    if delta_hat <= T::zero() {
        return (DVector::zeros(dim), T::zero(), dec_cauchy, radius_eff, false, 0);
    }

    let g0 = block.project_nullspace(rhs);
    let g0_norm = g0.norm();
    if g0_norm == T::zero() {
        return (DVector::zeros(dim), T::zero(), dec_cauchy, radius_eff, false, 0);
    }

    let tol = real::<T>(CG_TOL) * T::one().max(g0_norm);
    let max_iters = dim_x + block.dim_ineq() - block.dim_eq();

    let mut t = DVector::<T>::zeros(dim);
    let mut g = g0;
    let mut dir = -&g;
    let mut g_sq = g.norm_squared();
    let mut iterations = 0usize;

    while iterations < max_iters && g_sq.sqrt() > tol {
        iterations += 1;
        let wd = w.apply(&dir);
        let curvature = dir.dot(&wd);
        if curvature <= T::zero() {
            let tau = boundary_intersection(&t, &dir, delta_hat);
            t += &dir * tau;
            break;
        }
        let alpha = g_sq / curvature;
        let t_next = &t + &dir * alpha;
        if t_next.norm() >= delta_hat {
            let tau = boundary_intersection(&t, &dir, delta_hat);
            t += &dir * tau;
            break;
        }
        t = t_next;
        // Re-project the residual each iteration to control null-space drift.
        g = block.project_nullspace(&(&g + wd * alpha));
        let g_sq_next = g.norm_squared();
        let beta = g_sq_next / g_sq;
        g_sq = g_sq_next;
        dir = -&g + &dir * beta;
    }

    // Enforce the slack bounds, then check the Cauchy-fraction certificate.
    let beta = fraction_to_boundary_scale(&t, dim_x, eps_s, w_tilde_s);
    if beta < T::one() {
        t *= beta;
    }
    let decrease = model_decrease(w, rhs, &t);
    if decrease <= kappa_fcd * dec_cauchy {
        (t, decrease, dec_cauchy, radius_eff, false, iterations)
    } else {
        (t_cauchy, dec_cauchy, dec_cauchy, radius_eff, true, iterations)
    }
}

/// Full step computation: normal step, scaling, tangential solve, assembly.
pub fn compute_step<T: Scalar>(
    block: &ConstraintBlock<T>,
    w: &WBar<T>,
    psi_bar: &DVector<T>,
    delta: T,
    zeta: T,
    eps_s: T,
    kappa_fcd: T,
) -> StepResult<T> {
    let dim_x = block.dim_x();
    let n = block.dim_ineq();

    let v = normal_step(block);
    let v_slack = v.rows(dim_x, n).into_owned();
    let gamma_bar = normal_scaling(&v, &v_slack, delta, zeta, eps_s);
    let w_tilde = &v * gamma_bar;
    let w_tilde_s = w_tilde.rows(dim_x, n).into_owned();

    let delta_hat = (delta * delta - w_tilde.norm_squared()).max(T::zero()).sqrt();
    let rhs = psi_bar + w.apply(&v) * gamma_bar;

    let (t_tilde, tangential_decrease, cauchy_decrease, radius_eff, used_fallback, cg_iterations) =
        tangential_step(block, w, &rhs, delta_hat, eps_s, &w_tilde_s, kappa_fcd);

    let d_tilde = &w_tilde + &t_tilde;
    let dx = d_tilde.rows(0, dim_x).into_owned();
    let ds_tilde = d_tilde.rows(dim_x, n).into_owned();
    let ds = DVector::from_fn(n, |i, _| block.s[i] * ds_tilde[i]);

    StepResult {
        dx,
        ds,
        ds_tilde,
        d_tilde,
        w_tilde,
        t_tilde,
        gamma_bar,
        tangential_decrease,
        cauchy_decrease,
        radius_eff,
        delta_hat,
        used_cauchy_fallback: used_fallback,
        cg_iterations,
    }
}
