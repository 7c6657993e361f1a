//! Consistency checks for problem instances: finite-difference validation of
//! the analytic derivatives and the generic first-order optimality residual
//! used to vet catalog solutions.

use nalgebra::DVector;

use super::ProblemInstance;
use crate::scalar::{real, Scalar};

/// Central-difference check of `∇f`, `G`, and `J` at `x`.
///
/// Steps are `1e-6 · (1 + |xᵢ|)` per coordinate and agreement is measured as
/// `|fd - analytic| ≤ tol · (1 + |analytic|)`. Returns the worst mismatch as
/// an error string.
pub fn finite_difference_check<T: Scalar>(
    problem: &ProblemInstance<T>,
    x: &DVector<T>,
    tol: T,
) -> Result<(), String> {
    let d = problem.dim_x();
    let grad = problem.eval_grad_f(x);
    let g_mat = problem.eval_g(x);
    let j_mat = problem.eval_j(x);
    let mut worst: (f64, String) = (0.0, String::new());

    let record = |err: T, analytic: T, what: String, worst: &mut (f64, String)| {
        let rel = err.as_f64() / (1.0 + analytic.as_f64().abs());
        if rel > worst.0 {
            *worst = (rel, what);
        }
    };

    for i in 0..d {
        let step = real::<T>(1e-6) * (T::one() + x[i].abs());
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += step;
        xm[i] -= step;
        let two_h = real::<T>(2.0) * step;

        let fd_grad = (problem.eval_f(&xp) - problem.eval_f(&xm)) / two_h;
        record(
            (fd_grad - grad[i]).abs(),
            grad[i],
            format!("grad_f[{i}]"),
            &mut worst,
        );

        let (cp, cm) = (problem.eval_c(&xp), problem.eval_c(&xm));
        for r in 0..problem.dim_eq() {
            let fd = (cp[r] - cm[r]) / two_h;
            record(
                (fd - g_mat[(r, i)]).abs(),
                g_mat[(r, i)],
                format!("G[({r},{i})]"),
                &mut worst,
            );
        }

        let (hp, hm) = (problem.eval_h(&xp), problem.eval_h(&xm));
        for r in 0..problem.dim_ineq() {
            let fd = (hp[r] - hm[r]) / two_h;
            record(
                (fd - j_mat[(r, i)]).abs(),
                j_mat[(r, i)],
                format!("J[({r},{i})]"),
                &mut worst,
            );
        }
    }

    if worst.0 <= tol.as_f64() {
        Ok(())
    } else {
        Err(format!(
            "finite-difference mismatch {:.3e} in {} at x = {:?}",
            worst.0,
            worst.1,
            x.iter().map(|v| v.as_f64()).collect::<Vec<_>>()
        ))
    }
}

/// First-order optimality residual of the original problem at `(x, λ, τ)`:
/// the norm of stationarity, equality violation, inequality violation
/// `max(h, 0)`, multiplier negativity `max(-τ, 0)`, and complementarity
/// `τ ⊙ h`, stacked. Zero exactly at a KKT triple.
pub fn kkt_residual_original<T: Scalar>(
    problem: &ProblemInstance<T>,
    x: &DVector<T>,
    lambda: &DVector<T>,
    tau: &DVector<T>,
) -> T {
    let grad = problem.eval_grad_f(x);
    let g_mat = problem.eval_g(x);
    let j_mat = problem.eval_j(x);
    let c = problem.eval_c(x);
    let h = problem.eval_h(x);

    let stationarity = grad + g_mat.transpose() * lambda + j_mat.transpose() * tau;
    let mut sq = stationarity.norm_squared() + c.norm_squared();
    for i in 0..problem.dim_ineq() {
        let viol = h[i].max(T::zero());
        let neg = (-tau[i]).max(T::zero());
        let comp = tau[i] * h[i];
        sq += viol * viol + neg * neg + comp * comp;
    }
    sq.sqrt()
}
