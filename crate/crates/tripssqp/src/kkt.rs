//! Constraint-block linear algebra and stationarity measures.
//!
//! At an iterate `(x, s)` the constraints of the barrier problem linearize
//! through
//!
//! ```text
//! A = | G  0 |        ϑ = ( c ; h + s )
//!     | J  S |
//! ```
//!
//! with `S = diag(s)`. This module factors `A Aᵀ` once per iterate and
//! applies the null-space projector `P = I - Aᵀ[A Aᵀ]⁻¹A` without ever
//! forming it densely. It also computes the Lagrange-multiplier estimates,
//! the stationarity measure `Q = (Pψ; ϑ)`, and the relative KKT residual
//! used for termination.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::problem::ProblemInstance;
use crate::scalar::{real, Scalar};

/// Relative pivot threshold below which `A Aᵀ` is declared singular.
const PIVOT_RATIO: f64 = 1e-12;

/// Factored constraint block at one iterate.
pub struct ConstraintBlock<T: Scalar> {
    a: DMatrix<T>,
    chol: Cholesky<T, Dyn>,
    /// `ϑ = (c; h+s)`.
    pub theta_vec: DVector<T>,
    pub c: DVector<T>,
    pub h: DVector<T>,
    pub g_mat: DMatrix<T>,
    pub j_mat: DMatrix<T>,
    pub s: DVector<T>,
    dim_x: usize,
    dim_eq: usize,
    dim_ineq: usize,
}

fn checked_cholesky<T: Scalar>(mat: DMatrix<T>, what: &str) -> Result<Cholesky<T, Dyn>> {
    if mat.nrows() == 0 {
        // Empty block: trivially "factored".
        return Ok(Cholesky::new(mat).expect("0x0 factorization"));
    }
    let chol = Cholesky::new(mat)
        .ok_or_else(|| Error::SingularConstraint(format!("{what}: not positive definite")))?;
    let l = chol.l_dirty();
    let mut min_piv = l[(0, 0)];
    let mut max_piv = l[(0, 0)];
    for i in 1..l.nrows() {
        min_piv = min_piv.min(l[(i, i)]);
        max_piv = max_piv.max(l[(i, i)]);
    }
    if min_piv <= real::<T>(PIVOT_RATIO) * max_piv {
        return Err(Error::SingularConstraint(format!(
            "{what}: pivot ratio {:.3e}",
            (min_piv / max_piv).as_f64()
        )));
    }
    Ok(chol)
}

/// Assembles and factors the constraint block at `(x, s)`. Requires `s > 0`.
pub fn build_block<T: Scalar>(
    problem: &ProblemInstance<T>,
    x: &DVector<T>,
    s: &DVector<T>,
) -> Result<ConstraintBlock<T>> {
    let (d, m, n) = (problem.dim_x(), problem.dim_eq(), problem.dim_ineq());
    assert_eq!(s.len(), n);
    for v in s.iter() {
        if *v <= T::zero() {
            return Err(Error::Domain(v.as_f64()));
        }
    }
    let c = problem.eval_c(x);
    let h = problem.eval_h(x);
    let g_mat = problem.eval_g(x);
    let j_mat = problem.eval_j(x);

    let mut a = DMatrix::<T>::zeros(m + n, d + n);
    if m > 0 {
        a.view_mut((0, 0), (m, d)).copy_from(&g_mat);
    }
    a.view_mut((m, 0), (n, d)).copy_from(&j_mat);
    for i in 0..n {
        a[(m + i, d + i)] = s[i];
    }

    let mut theta_vec = DVector::<T>::zeros(m + n);
    theta_vec.rows_mut(0, m).copy_from(&c);
    for i in 0..n {
        theta_vec[m + i] = h[i] + s[i];
    }

    let aat = &a * a.transpose();
    let chol = checked_cholesky(aat, "A*A^T")?;

    Ok(ConstraintBlock {
        a,
        chol,
        theta_vec,
        c,
        h,
        g_mat,
        j_mat,
        s: s.clone(),
        dim_x: d,
        dim_eq: m,
        dim_ineq: n,
    })
}

impl<T: Scalar> ConstraintBlock<T> {
    pub fn a(&self) -> &DMatrix<T> {
        &self.a
    }
    pub fn rows(&self) -> usize {
        self.dim_eq + self.dim_ineq
    }
    pub fn cols(&self) -> usize {
        self.dim_x + self.dim_ineq
    }
    pub fn dim_x(&self) -> usize {
        self.dim_x
    }
    pub fn dim_eq(&self) -> usize {
        self.dim_eq
    }
    pub fn dim_ineq(&self) -> usize {
        self.dim_ineq
    }

    pub fn apply_a(&self, v: &DVector<T>) -> DVector<T> {
        &self.a * v
    }

    pub fn apply_at(&self, y: &DVector<T>) -> DVector<T> {
        self.a.transpose() * y
    }

    /// `[A Aᵀ]⁻¹ r` via the stored factorization.
    pub fn solve_aat(&self, r: &DVector<T>) -> DVector<T> {
        self.chol.solve(r)
    }

    /// Applies `P = I - Aᵀ[A Aᵀ]⁻¹A` without forming it.
    pub fn project_nullspace(&self, v: &DVector<T>) -> DVector<T> {
        let av = self.apply_a(v);
        let y = self.solve_aat(&av);
        v - self.apply_at(&y)
    }

    /// Stationarity measure `Q = (Pψ; ϑ)` for a (possibly estimated)
    /// barrier gradient `ψ`.
    pub fn stationarity_measure(&self, psi: &DVector<T>) -> DVector<T> {
        let proj = self.project_nullspace(psi);
        let mut q = DVector::zeros(self.cols() + self.rows());
        q.rows_mut(0, self.cols()).copy_from(&proj);
        q.rows_mut(self.cols(), self.rows()).copy_from(&self.theta_vec);
        q
    }
}

/// Multipliers `τ = θ S⁻¹𝟙` and `λ = -[G Gᵀ]⁻¹ G (g + θ Jᵀ S⁻¹𝟙)` for a
/// gradient vector `g` (exact or estimated). `λ` is empty when `m = 0`.
pub fn multipliers_from_gradient<T: Scalar>(
    g: &DVector<T>,
    g_mat: &DMatrix<T>,
    j_mat: &DMatrix<T>,
    s: &DVector<T>,
    theta: T,
) -> Result<(DVector<T>, DVector<T>)> {
    let n = s.len();
    let tau = DVector::from_fn(n, |i, _| theta / s[i]);
    let m = g_mat.nrows();
    if m == 0 {
        return Ok((DVector::zeros(0), tau));
    }
    let ggt = g_mat * g_mat.transpose();
    let chol = checked_cholesky(ggt, "G*G^T")?;
    let rhs = g_mat * (g + j_mat.transpose() * &tau);
    let lambda = -chol.solve(&rhs);
    Ok((lambda, tau))
}

/// True multipliers at `(x, s, θ)` from the exact gradient.
pub fn true_multipliers<T: Scalar>(
    problem: &ProblemInstance<T>,
    x: &DVector<T>,
    s: &DVector<T>,
    theta: T,
) -> Result<(DVector<T>, DVector<T>)> {
    let grad = problem.eval_grad_f(x);
    let g_mat = problem.eval_g(x);
    let j_mat = problem.eval_j(x);
    multipliers_from_gradient(&grad, &g_mat, &j_mat, s, theta)
}

/// Norm of the KKT residual `(∇f + Gᵀλ + Jᵀτ; c; min{-h, τ})` at `(x, s, θ)`
/// with the true multipliers; the minimum is elementwise.
pub fn kkt_residual_norm<T: Scalar>(
    problem: &ProblemInstance<T>,
    x: &DVector<T>,
    s: &DVector<T>,
    theta: T,
) -> Result<T> {
    let grad = problem.eval_grad_f(x);
    let g_mat = problem.eval_g(x);
    let j_mat = problem.eval_j(x);
    let h = problem.eval_h(x);
    let c = problem.eval_c(x);
    let (lambda, tau) = multipliers_from_gradient(&grad, &g_mat, &j_mat, s, theta)?;
    let stationarity = grad + g_mat.transpose() * &lambda + j_mat.transpose() * &tau;
    let mut sq = stationarity.norm_squared() + c.norm_squared();
    for i in 0..h.len() {
        let comp = (-h[i]).min(tau[i]);
        sq += comp * comp;
    }
    Ok(sq.sqrt())
}

/// Termination denominator: `max{‖KKT residual at (x₀, s₀, θ₀)‖, 1}`.
pub fn reference_scale<T: Scalar>(
    problem: &ProblemInstance<T>,
    x0: &DVector<T>,
    s0: &DVector<T>,
    theta0: T,
) -> Result<T> {
    Ok(kkt_residual_norm(problem, x0, s0, theta0)?.max(T::one()))
}

/// Relative KKT residual with a precomputed reference scale.
pub fn relative_kkt_residual<T: Scalar>(
    problem: &ProblemInstance<T>,
    x: &DVector<T>,
    s: &DVector<T>,
    theta: T,
    ref_scale: T,
) -> Result<T> {
    Ok(kkt_residual_norm(problem, x, s, theta)? / ref_scale)
}

/// Diagnostic: both sides of the bound
/// `‖∇f + Gᵀλ + Jᵀτ‖ ≤ (1 + √(κ₂/κ₁)) ‖Pψ‖`,
/// where `κ₁, κ₂` are the extreme eigenvalues of `A Aᵀ` at the iterate and
/// `ψ = (∇f; -θ𝟙)`. Used by trace checks, not by the solver.
pub fn lagrangian_bound_sides<T: Scalar>(
    problem: &ProblemInstance<T>,
    x: &DVector<T>,
    s: &DVector<T>,
    theta: T,
) -> Result<(T, T)> {
    let block = build_block(problem, x, s)?;
    let grad = problem.eval_grad_f(x);
    let (lambda, tau) =
        multipliers_from_gradient(&grad, &block.g_mat, &block.j_mat, s, theta)?;
    let lhs = (&grad + block.g_mat.transpose() * &lambda + block.j_mat.transpose() * &tau).norm();

    let d = problem.dim_x();
    let n = problem.dim_ineq();
    let mut psi = DVector::<T>::zeros(d + n);
    psi.rows_mut(0, d).copy_from(&grad);
    for i in 0..n {
        psi[d + i] = -theta;
    }
    let proj_norm = block.project_nullspace(&psi).norm();

    let aat = block.a() * block.a().transpose();
    let eig = aat.symmetric_eigen();
    let mut kappa1 = T::max_value().unwrap();
    let mut kappa2 = T::zero();
    for ev in eig.eigenvalues.iter() {
        kappa1 = kappa1.min(*ev);
        kappa2 = kappa2.max(*ev);
    }
    let factor = T::one() + (kappa2 / kappa1).sqrt();
    Ok((lhs, factor * proj_norm))
}
