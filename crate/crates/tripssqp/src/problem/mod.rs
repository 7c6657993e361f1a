//! Constrained-problem abstraction and built-in problem families.
//!
//! A [`ProblemInstance`] bundles deterministic evaluators for the objective,
//! the equality constraints `c : ℝᵈ → ℝᵐ`, and the inequality constraints
//! `h : ℝᵈ → ℝⁿ`, together with their Jacobians `G = ∇cᵀ` and `J = ∇hᵀ` and
//! optional second derivatives. Stochasticity is layered on top by the
//! oracle module; the instance itself is pure and shareable across threads.

mod check;
mod csv_data;
mod logistic;
mod suite;

pub use check::{finite_difference_check, kkt_residual_original};
pub use csv_data::load_csv_dataset;
pub use logistic::{make_logistic_problem, DatasetKind, LogisticProblemConfig};
pub use suite::make_analytic_suite;

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

type ScalarFn<T> = Box<dyn Fn(&DVector<T>) -> T + Send + Sync>;
type VectorFn<T> = Box<dyn Fn(&DVector<T>) -> DVector<T> + Send + Sync>;
type MatrixFn<T> = Box<dyn Fn(&DVector<T>) -> DMatrix<T> + Send + Sync>;
/// Per-constraint Hessian: `(x, i) ↦ ∇²c⁽ⁱ⁾(x)` (or `∇²h⁽ⁱ⁾`).
type ConstraintHessFn<T> = Box<dyn Fn(&DVector<T>, usize) -> DMatrix<T> + Send + Sync>;

/// Per-sample evaluators backing the subsampling noise model. `count` is the
/// number of data points `N`; evaluators receive a sample index in `0..N`.
pub struct PerSampleEvals<T: Scalar> {
    pub count: usize,
    pub value: Box<dyn Fn(&DVector<T>, usize) -> T + Send + Sync>,
    pub grad: Box<dyn Fn(&DVector<T>, usize) -> DVector<T> + Send + Sync>,
    pub hess: Option<Box<dyn Fn(&DVector<T>, usize) -> DMatrix<T> + Send + Sync>>,
}

/// A deterministic constrained problem instance.
///
/// Invariants: `d ≥ 1`, `0 ≤ m < d`, `n ≥ 1` (the interior-point path needs
/// at least one inequality). `m = 0` is represented by empty vectors and
/// `0 × d` Jacobians.
pub struct ProblemInstance<T: Scalar> {
    name: String,
    dim_x: usize,
    dim_eq: usize,
    dim_ineq: usize,
    f: ScalarFn<T>,
    grad_f: VectorFn<T>,
    hess_f: Option<MatrixFn<T>>,
    c: VectorFn<T>,
    jac_c: MatrixFn<T>,
    h: VectorFn<T>,
    jac_h: MatrixFn<T>,
    hess_c: Option<ConstraintHessFn<T>>,
    hess_h: Option<ConstraintHessFn<T>>,
    per_sample: Option<PerSampleEvals<T>>,
    x0: DVector<T>,
    known_solution: Option<DVector<T>>,
    known_multipliers: Option<(DVector<T>, DVector<T>)>,
}

impl<T: Scalar> ProblemInstance<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        dim_x: usize,
        dim_eq: usize,
        dim_ineq: usize,
        f: ScalarFn<T>,
        grad_f: VectorFn<T>,
        c: VectorFn<T>,
        jac_c: MatrixFn<T>,
        h: VectorFn<T>,
        jac_h: MatrixFn<T>,
        x0: DVector<T>,
    ) -> Self {
        assert!(dim_x >= 1, "need at least one variable");
        assert!(dim_ineq >= 1, "interior-point path requires n >= 1");
        assert!(dim_eq < dim_x, "need m < d");
        assert_eq!(x0.len(), dim_x);
        ProblemInstance {
            name: name.into(),
            dim_x,
            dim_eq,
            dim_ineq,
            f,
            grad_f,
            hess_f: None,
            c,
            jac_c,
            h,
            jac_h,
            hess_c: None,
            hess_h: None,
            per_sample: None,
            x0,
            known_solution: None,
            known_multipliers: None,
        }
    }

    pub fn with_hess_f(mut self, hess: MatrixFn<T>) -> Self {
        self.hess_f = Some(hess);
        self
    }

    pub fn with_constraint_hessians(
        mut self,
        hess_c: ConstraintHessFn<T>,
        hess_h: ConstraintHessFn<T>,
    ) -> Self {
        self.hess_c = Some(hess_c);
        self.hess_h = Some(hess_h);
        self
    }

    pub fn with_per_sample(mut self, per_sample: PerSampleEvals<T>) -> Self {
        self.per_sample = Some(per_sample);
        self
    }

    pub fn with_known_solution(
        mut self,
        x_star: DVector<T>,
        lambda: DVector<T>,
        tau: DVector<T>,
    ) -> Self {
        assert_eq!(x_star.len(), self.dim_x);
        assert_eq!(lambda.len(), self.dim_eq);
        assert_eq!(tau.len(), self.dim_ineq);
        self.known_solution = Some(x_star);
        self.known_multipliers = Some((lambda, tau));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
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
    pub fn x0(&self) -> &DVector<T> {
        &self.x0
    }
    pub fn known_solution(&self) -> Option<&DVector<T>> {
        self.known_solution.as_ref()
    }
    pub fn known_multipliers(&self) -> Option<&(DVector<T>, DVector<T>)> {
        self.known_multipliers.as_ref()
    }
    pub fn has_hessians(&self) -> bool {
        self.hess_f.is_some() && self.hess_c.is_some() && self.hess_h.is_some()
    }
    pub fn per_sample(&self) -> Option<&PerSampleEvals<T>> {
        self.per_sample.as_ref()
    }

    pub fn eval_f(&self, x: &DVector<T>) -> T {
        (self.f)(x)
    }
    pub fn eval_grad_f(&self, x: &DVector<T>) -> DVector<T> {
        (self.grad_f)(x)
    }
    pub fn eval_hess_f(&self, x: &DVector<T>) -> Option<DMatrix<T>> {
        self.hess_f.as_ref().map(|h| h(x))
    }
    pub fn eval_c(&self, x: &DVector<T>) -> DVector<T> {
        (self.c)(x)
    }
    /// Equality Jacobian `G(x) ∈ ℝ^{m×d}`.
    pub fn eval_g(&self, x: &DVector<T>) -> DMatrix<T> {
        (self.jac_c)(x)
    }
    pub fn eval_h(&self, x: &DVector<T>) -> DVector<T> {
        (self.h)(x)
    }
    /// Inequality Jacobian `J(x) ∈ ℝ^{n×d}`.
    pub fn eval_j(&self, x: &DVector<T>) -> DMatrix<T> {
        (self.jac_h)(x)
    }
    pub fn eval_hess_c(&self, x: &DVector<T>, i: usize) -> Option<DMatrix<T>> {
        self.hess_c.as_ref().map(|f| f(x, i))
    }
    pub fn eval_hess_h(&self, x: &DVector<T>, i: usize) -> Option<DMatrix<T>> {
        self.hess_h.as_ref().map(|f| f(x, i))
    }
}

impl<T: Scalar> std::fmt::Debug for ProblemInstance<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("name", &self.name)
            .field("dim_x", &self.dim_x)
            .field("dim_eq", &self.dim_eq)
            .field("dim_ineq", &self.dim_ineq)
            .finish()
    }
}
