//! Built-in analytic test suite.
//!
//! Ten problem families at desk scale (`d ≤ 20`, `m ≤ 5`, `n ≤ 10`) with
//! smooth objectives (convex quadratics, Rosenbrock, log-sum-exp), linear and
//! nonlinear constraints, and a first-order solution that is known in closed
//! form per instance. Parameters are drawn from a seeded stream, the KKT
//! triple is constructed analytically, and construction asserts that its
//! optimality residual is at machine-accuracy level before the instance is
//! handed out.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::check::kkt_residual_original;
use super::ProblemInstance;
use crate::rng::{stream, StreamDomain};
use crate::scalar::{real, Scalar};

fn normal<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    real(rng.sample::<f64, _>(StandardNormal))
}

fn uniform<T: Scalar>(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> T {
    real(rng.random_range(lo..hi))
}

fn normal_vec<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> DVector<T> {
    DVector::from_fn(n, |_, _| normal(rng))
}

/// `f(x) = ½ (x - x̂)ᵀ B (x - x̂)` with diagonal `B`; identity when `b = None`.
struct QuadParts<T: Scalar> {
    target: DVector<T>,
    diag: Option<DVector<T>>,
}

impl<T: Scalar> QuadParts<T> {
    fn value(&self, x: &DVector<T>) -> T {
        let e = x - &self.target;
        match &self.diag {
            None => real::<T>(0.5) * e.norm_squared(),
            Some(b) => real::<T>(0.5) * e.component_mul(b).dot(&e),
        }
    }
    fn grad(&self, x: &DVector<T>) -> DVector<T> {
        let e = x - &self.target;
        match &self.diag {
            None => e,
            Some(b) => e.component_mul(b),
        }
    }
    fn hess(&self, d: usize) -> DMatrix<T> {
        match &self.diag {
            None => DMatrix::identity(d, d),
            Some(b) => DMatrix::from_diagonal(b),
        }
    }
}

/// Builds instance `index` of the suite (catalog slot `index % 10`) from the
/// given seed.
fn build_instance<T: Scalar>(seed: u64, index: usize) -> ProblemInstance<T> {
    let mut rng = stream(seed, index as u64, StreamDomain::ProblemGen(7));
    let slot = index % 10;
    let problem: ProblemInstance<T> = match slot {
        0 => box_qp(&mut rng, index),
        1 => eq_ball_qp(&mut rng, index),
        2 => active_ball(&mut rng, index),
        3 => rosenbrock_box(&mut rng, index),
        4 => lse_shifted(&mut rng, index),
        5 => eq_active_edge(&mut rng, index),
        6 => sphere_eq(&mut rng, index),
        7 => exp_ineq(&mut rng, index),
        8 => rosenbrock_eq(&mut rng, index),
        _ => wide_box_qp(&mut rng, index),
    };
    let (lambda, tau) = problem.known_multipliers().expect("catalog stores multipliers");
    let x_star = problem.known_solution().expect("catalog stores solution");
    let residual = kkt_residual_original(&problem, x_star, lambda, tau);
    let tol = real::<T>(1e-8).max(T::eps() * real(1e4));
    assert!(
        residual <= tol,
        "catalog solution for {} has optimality residual {:.3e}",
        problem.name(),
        residual.as_f64()
    );
    problem
}

/// Builds `count` deterministic problem instances cycling through the
/// catalog; identical `(count, seed)` yield bitwise-identical instances.
pub fn make_analytic_suite<T: Scalar>(count: usize, seed: u64) -> Vec<ProblemInstance<T>> {
    assert!(count >= 1);
    (0..count).map(|i| build_instance(seed, i)).collect()
}

fn zero_constraint_hessians<T: Scalar>(
    problem: ProblemInstance<T>,
    d: usize,
) -> ProblemInstance<T> {
    problem.with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
    )
}

/// Slot 0: quadratic objective on the box `x ≤ 1`, no equalities (`m = 0`,
/// `n = d`). At least one bound is active at the solution.
fn box_qp<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 3;
    let mut target = DVector::from_fn(d, |_, _| uniform::<T>(rng, 0.25, 1.75));
    target[0] = T::one() + uniform::<T>(rng, 0.25, 0.75);
    target[1] = T::one() - uniform::<T>(rng, 0.25, 0.75);
    let quad = QuadParts {
        target: target.clone(),
        diag: None,
    };

    let x_star = target.map(|t| t.min(T::one()));
    let tau = &target - &x_star;
    let x0 = DVector::from_fn(d, |_, _| uniform::<T>(rng, 250.0, 400.0));

    let q_val = QuadParts {
        target: target.clone(),
        diag: None,
    };
    let q_grad = QuadParts {
        target,
        diag: None,
    };
    let problem = ProblemInstance::new(
        format!("analytic-{index}-box-qp"),
        d,
        0,
        d,
        Box::new(move |x| q_val.value(x)),
        Box::new(move |x| q_grad.grad(x)),
        Box::new(|_x| DVector::zeros(0)),
        Box::new(move |_x| DMatrix::zeros(0, d)),
        Box::new(|x| x.map(|v| v - T::one())),
        Box::new(move |_x| DMatrix::identity(d, d)),
        x0,
    )
    .with_hess_f(Box::new(move |_x| quad.hess(d)))
    .with_known_solution(x_star, DVector::zeros(0), tau);
    zero_constraint_hessians(problem, d)
}

/// Slot 1: strictly convex quadratic with two random linear equalities and an
/// inactive ball constraint. The solution solves the equality-constrained
/// KKT system exactly.
fn eq_ball_qp<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 5;
    let m = 2;
    let diag = DVector::from_fn(d, |_, _| uniform::<T>(rng, 0.5, 3.0));
    let q = normal_vec::<T>(rng, d);
    let g_mat = DMatrix::<T>::from_fn(m, d, |_, _| normal(rng));
    let b_eq = normal_vec::<T>(rng, m);

    // Solve [B Gᵀ; G 0] (x; λ) = (-q; b).
    let mut kkt = DMatrix::<T>::zeros(d + m, d + m);
    for i in 0..d {
        kkt[(i, i)] = diag[i];
    }
    kkt.view_mut((0, d), (d, m)).copy_from(&g_mat.transpose());
    kkt.view_mut((d, 0), (m, d)).copy_from(&g_mat);
    let mut rhs = DVector::<T>::zeros(d + m);
    rhs.rows_mut(0, d).copy_from(&(-&q));
    rhs.rows_mut(d, m).copy_from(&b_eq);
    let sol = kkt.lu().solve(&rhs).expect("equality KKT system solvable");
    let x_star = sol.rows(0, d).into_owned();
    let lambda = sol.rows(d, m).into_owned();
    let radius_sq = x_star.norm_squared() + T::one();

    let x0 = &x_star + normal_vec::<T>(rng, d) * real::<T>(0.5);
    let (diag_f, diag_g, diag_h) = (diag.clone(), diag.clone(), diag);
    let (q_f, q_g) = (q.clone(), q);
    let (g1, g2) = (g_mat.clone(), g_mat);
    let b1 = b_eq;

    let problem = ProblemInstance::new(
        format!("analytic-{index}-eq-ball-qp"),
        d,
        m,
        1,
        Box::new(move |x| {
            real::<T>(0.5) * x.component_mul(&diag_f).dot(x) + q_f.dot(x)
        }),
        Box::new(move |x| x.component_mul(&diag_g) + &q_g),
        Box::new(move |x| &g1 * x - &b1),
        Box::new(move |_x| g2.clone()),
        Box::new(move |x| DVector::from_element(1, x.norm_squared() - radius_sq)),
        Box::new(move |x| {
            let mut j = DMatrix::zeros(1, d);
            for i in 0..d {
                j[(0, i)] = real::<T>(2.0) * x[i];
            }
            j
        }),
        x0,
    )
    .with_hess_f(Box::new(move |_x| DMatrix::from_diagonal(&diag_h)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |_x, _i| DMatrix::identity(d, d) * real::<T>(2.0)),
    )
    .with_known_solution(x_star, lambda, DVector::zeros(1));
    problem
}

/// Slot 2: nearest point to an exterior target over the unit ball; the
/// nonlinear inequality is active with a strictly positive multiplier.
fn active_ball<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 4;
    let scale = uniform::<T>(rng, 2.0, 4.0);
    let dir = normal_vec::<T>(rng, d);
    let target = &dir * (scale / dir.norm());
    let x_star = &target / target.norm();
    let tau = DVector::from_element(1, (target.norm() - T::one()) / real::<T>(2.0));
    let x0_dir = normal_vec::<T>(rng, d);
    let x0 = &x0_dir * (real::<T>(50.0) / x0_dir.norm());

    let quad = QuadParts {
        target: target.clone(),
        diag: None,
    };
    let q_grad = QuadParts {
        target,
        diag: None,
    };
    ProblemInstance::new(
        format!("analytic-{index}-active-ball"),
        d,
        0,
        1,
        Box::new(move |x| quad.value(x)),
        Box::new(move |x| q_grad.grad(x)),
        Box::new(|_x| DVector::zeros(0)),
        Box::new(move |_x| DMatrix::zeros(0, d)),
        Box::new(|x| DVector::from_element(1, x.norm_squared() - T::one())),
        Box::new(move |x| {
            let mut j = DMatrix::zeros(1, d);
            for i in 0..d {
                j[(0, i)] = real::<T>(2.0) * x[i];
            }
            j
        }),
        x0,
    )
    .with_hess_f(Box::new(move |_x| DMatrix::identity(d, d)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |_x, _i| DMatrix::identity(d, d) * real::<T>(2.0)),
    )
    .with_known_solution(x_star, DVector::zeros(0), tau)
}

fn rosenbrock_value<T: Scalar>(x: &DVector<T>) -> T {
    let mut v = T::zero();
    let hundred = real::<T>(100.0);
    for i in 0..x.len() - 1 {
        let a = x[i + 1] - x[i] * x[i];
        let b = T::one() - x[i];
        v += hundred * a * a + b * b;
    }
    v
}

fn rosenbrock_grad<T: Scalar>(x: &DVector<T>) -> DVector<T> {
    let d = x.len();
    let mut g = DVector::zeros(d);
    let (c2, c4) = (real::<T>(200.0), real::<T>(400.0));
    for i in 0..d - 1 {
        let a = x[i + 1] - x[i] * x[i];
        g[i] += -c4 * x[i] * a - real::<T>(2.0) * (T::one() - x[i]);
        g[i + 1] += c2 * a;
    }
    g
}

fn rosenbrock_hess<T: Scalar>(x: &DVector<T>) -> DMatrix<T> {
    let d = x.len();
    let mut h = DMatrix::zeros(d, d);
    let (c2, c4, c12) = (real::<T>(200.0), real::<T>(400.0), real::<T>(1200.0));
    for i in 0..d - 1 {
        h[(i, i)] += c12 * x[i] * x[i] - c4 * x[i + 1] + real::<T>(2.0);
        h[(i + 1, i + 1)] += c2;
        h[(i, i + 1)] += -c4 * x[i];
        h[(i + 1, i)] += -c4 * x[i];
    }
    h
}

/// Slot 3: Rosenbrock under inactive bounds `x ≤ 2`; the unconstrained
/// minimizer at the all-ones vector is the exact solution.
fn rosenbrock_box<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 4;
    let x0 = DVector::from_fn(d, |_, _| uniform::<T>(rng, -2.0, -1.0));
    ProblemInstance::new(
        format!("analytic-{index}-rosenbrock-box"),
        d,
        0,
        d,
        Box::new(|x| rosenbrock_value(x)),
        Box::new(|x| rosenbrock_grad(x)),
        Box::new(|_x| DVector::zeros(0)),
        Box::new(move |_x| DMatrix::zeros(0, d)),
        Box::new(|x| x.map(|v| v - real::<T>(2.0))),
        Box::new(move |_x| DMatrix::identity(d, d)),
        x0,
    )
    .with_hess_f(Box::new(|x| rosenbrock_hess(x)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
    )
    .with_known_solution(
        DVector::from_element(d, T::one()),
        DVector::zeros(0),
        DVector::zeros(d),
    )
}

struct LseParts<T: Scalar> {
    a: DMatrix<T>,
    b: DVector<T>,
}

impl<T: Scalar> LseParts<T> {
    fn softmax(&self, x: &DVector<T>) -> (T, DVector<T>) {
        let u = &self.a * x + &self.b;
        let m = u.iter().fold(u[0], |acc, v| acc.max(*v));
        let mut p = u.map(|v| (v - m).exp());
        let total: T = p.iter().fold(T::zero(), |acc, v| acc + *v);
        p /= total;
        (m + total.ln(), p)
    }
    fn value(&self, x: &DVector<T>) -> T {
        self.softmax(x).0
    }
    fn grad(&self, x: &DVector<T>) -> DVector<T> {
        let (_, p) = self.softmax(x);
        self.a.transpose() * p
    }
    fn hess(&self, x: &DVector<T>) -> DMatrix<T> {
        let (_, p) = self.softmax(x);
        let ap = self.a.transpose() * &p;
        let mut h = self.a.transpose() * DMatrix::from_diagonal(&p) * &self.a;
        h -= &ap * ap.transpose();
        h
    }
}

/// Slot 4: log-sum-exp objective tilted so that a drawn interior point is
/// stationary, one linear equality through that point, inactive ball.
fn lse_shifted<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 5;
    let k = 8;
    let a = DMatrix::<T>::from_fn(k, d, |_, _| normal(rng));
    let b = normal_vec::<T>(rng, k);
    let x_star = normal_vec::<T>(rng, d) * real::<T>(0.5);
    let lse = LseParts { a: a.clone(), b: b.clone() };
    let tilt = lse.grad(&x_star);

    let mut a_c = normal_vec::<T>(rng, d);
    if a_c.norm() < real(0.5) {
        a_c += DVector::from_element(d, T::one());
    }
    let c_rhs = a_c.dot(&x_star);
    let radius_sq = x_star.norm_squared() + T::one();
    let x0 = &x_star + normal_vec::<T>(rng, d) * real::<T>(4.0);

    let lse_f = LseParts { a: a.clone(), b: b.clone() };
    let lse_g = LseParts { a: a.clone(), b: b.clone() };
    let lse_h = LseParts { a, b };
    let (tilt_f, tilt_g) = (tilt.clone(), tilt);
    let (ac1, ac2) = (a_c.clone(), a_c);

    ProblemInstance::new(
        format!("analytic-{index}-lse-shifted"),
        d,
        1,
        1,
        Box::new(move |x| lse_f.value(x) - tilt_f.dot(x)),
        Box::new(move |x| lse_g.grad(x) - &tilt_g),
        Box::new(move |x| DVector::from_element(1, ac1.dot(x) - c_rhs)),
        Box::new(move |_x| DMatrix::from_rows(&[ac2.transpose()])),
        Box::new(move |x| DVector::from_element(1, x.norm_squared() - radius_sq)),
        Box::new(move |x| {
            let mut j = DMatrix::zeros(1, d);
            for i in 0..d {
                j[(0, i)] = real::<T>(2.0) * x[i];
            }
            j
        }),
        x0,
    )
    .with_hess_f(Box::new(move |x| lse_h.hess(x)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |_x, _i| DMatrix::identity(d, d) * real::<T>(2.0)),
    )
    .with_known_solution(x_star, DVector::zeros(1), DVector::zeros(1))
}

/// Slot 5: quadratic with one linear equality and one active linear
/// inequality; the KKT triple is assembled by choosing the multipliers first.
fn eq_active_edge<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 5;
    let edge = uniform::<T>(rng, -0.5, 0.5);
    let mut x_star = normal_vec::<T>(rng, d);
    x_star[0] = edge;
    let b0 = x_star.sum();
    let lambda = uniform::<T>(rng, -1.0, 1.0);
    let tau = uniform::<T>(rng, 0.2, 1.0);
    let mut target = x_star.clone();
    for i in 0..d {
        target[i] += lambda;
    }
    target[0] += tau;
    let x0 = &x_star + normal_vec::<T>(rng, d) * real::<T>(150.0);

    let quad = QuadParts { target: target.clone(), diag: None };
    let q_grad = QuadParts { target, diag: None };
    ProblemInstance::new(
        format!("analytic-{index}-eq-active-edge"),
        d,
        1,
        1,
        Box::new(move |x| quad.value(x)),
        Box::new(move |x| q_grad.grad(x)),
        Box::new(move |x| DVector::from_element(1, x.sum() - b0)),
        Box::new(move |_x| DMatrix::from_element(1, d, T::one())),
        Box::new(move |x| DVector::from_element(1, x[0] - edge)),
        Box::new(move |_x| {
            let mut j = DMatrix::zeros(1, d);
            j[(0, 0)] = T::one();
            j
        }),
        x0,
    )
    .with_hess_f(Box::new(move |_x| DMatrix::identity(d, d)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
    )
    .with_known_solution(
        x_star,
        DVector::from_element(1, lambda),
        DVector::from_element(1, tau),
    )
}

/// Slot 6: linear objective on the unit sphere (nonlinear equality) with
/// inactive bounds. The minimizer is `-q/‖q‖` with multiplier `‖q‖/2`.
fn sphere_eq<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 3;
    let raw = normal_vec::<T>(rng, d);
    let target_norm = uniform::<T>(rng, 1.0, 2.0);
    let q = &raw * (target_norm / raw.norm());
    let x_star = -(&q) / q.norm();
    let lambda = q.norm() / real::<T>(2.0);
    let x0_raw = normal_vec::<T>(rng, d);
    let x0 = &x0_raw * (real::<T>(8.0) / x0_raw.norm());

    let (q1, q2) = (q.clone(), q);
    ProblemInstance::new(
        format!("analytic-{index}-sphere-eq"),
        d,
        1,
        d,
        Box::new(move |x| q1.dot(x)),
        Box::new(move |_x| q2.clone()),
        Box::new(|x| DVector::from_element(1, x.norm_squared() - T::one())),
        Box::new(move |x| {
            let mut g = DMatrix::zeros(1, d);
            for i in 0..d {
                g[(0, i)] = real::<T>(2.0) * x[i];
            }
            g
        }),
        Box::new(|x| x.map(|v| v - real::<T>(2.0))),
        Box::new(move |_x| DMatrix::identity(d, d)),
        x0,
    )
    .with_hess_f(Box::new(move |_x| DMatrix::zeros(d, d)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::identity(d, d) * real::<T>(2.0)),
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
    )
    .with_known_solution(x_star, DVector::from_element(1, lambda), DVector::zeros(d))
}

/// Slot 7: quadratic with an active exponential inequality `exp(aᵀx) ≤ 1`
/// and an inactive ball.
fn exp_ineq<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 4;
    let raw = normal_vec::<T>(rng, d);
    let a = &raw / raw.norm();
    let y = normal_vec::<T>(rng, d);
    let x_star = &y - &a * a.dot(&y);
    let tau1 = uniform::<T>(rng, 0.3, 1.0);
    let target = &x_star + &a * tau1;
    let radius_sq = x_star.norm_squared() + T::one();
    let off = normal_vec::<T>(rng, d) * real::<T>(100.0);
    let x0 = &x_star + &off - &a * (a.dot(&off) + real::<T>(120.0));

    let quad = QuadParts { target: target.clone(), diag: None };
    let q_grad = QuadParts { target, diag: None };
    let (a_h, a_j, a_hh) = (a.clone(), a.clone(), a);
    let tau = DVector::from_vec(vec![tau1, T::zero()]);

    ProblemInstance::new(
        format!("analytic-{index}-exp-ineq"),
        d,
        0,
        2,
        Box::new(move |x| quad.value(x)),
        Box::new(move |x| q_grad.grad(x)),
        Box::new(|_x| DVector::zeros(0)),
        Box::new(move |_x| DMatrix::zeros(0, d)),
        Box::new(move |x| {
            DVector::from_vec(vec![
                a_h.dot(x).exp() - T::one(),
                x.norm_squared() - radius_sq,
            ])
        }),
        Box::new(move |x| {
            let mut j = DMatrix::zeros(2, d);
            let e = a_j.dot(x).exp();
            for i in 0..d {
                j[(0, i)] = e * a_j[i];
                j[(1, i)] = real::<T>(2.0) * x[i];
            }
            j
        }),
        x0,
    )
    .with_hess_f(Box::new(move |_x| DMatrix::identity(d, d)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |x, i| {
            if i == 0 {
                let e = a_hh.dot(x).exp();
                (&a_hh * a_hh.transpose()) * e
            } else {
                DMatrix::identity(d, d) * real::<T>(2.0)
            }
        }),
    )
    .with_known_solution(x_star, DVector::zeros(0), tau)
}

/// Slot 8: 2-d Rosenbrock restricted to the diagonal `x₁ = x₂` with inactive
/// positivity bounds; the unconstrained minimizer `(1,1)` satisfies
/// everything with zero multipliers.
fn rosenbrock_eq<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 2;
    let x0 = DVector::from_fn(d, |_, _| uniform::<T>(rng, -2.0, -1.0));
    ProblemInstance::new(
        format!("analytic-{index}-rosenbrock-eq"),
        d,
        1,
        d,
        Box::new(|x| rosenbrock_value(x)),
        Box::new(|x| rosenbrock_grad(x)),
        Box::new(|x| DVector::from_element(1, x[0] - x[1])),
        Box::new(move |_x| {
            let mut g = DMatrix::zeros(1, d);
            g[(0, 0)] = T::one();
            g[(0, 1)] = -T::one();
            g
        }),
        Box::new(|x| x.map(|v| -v)),
        Box::new(move |_x| -DMatrix::<T>::identity(d, d)),
        x0,
    )
    .with_hess_f(Box::new(|x| rosenbrock_hess(x)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
    )
    .with_known_solution(
        DVector::from_element(d, T::one()),
        DVector::zeros(1),
        DVector::zeros(d),
    )
}

/// Slot 9: diagonal quadratic inside the unit box with two-sided bounds
/// (`n = 2d`); one upper and one lower bound are forced active.
fn wide_box_qp<T: Scalar>(rng: &mut ChaCha8Rng, index: usize) -> ProblemInstance<T> {
    let d = 5;
    let diag = DVector::from_fn(d, |_, _| uniform::<T>(rng, 0.5, 3.0));
    let mut target = DVector::from_fn(d, |_, _| uniform::<T>(rng, 0.1, 0.9));
    target[0] = uniform::<T>(rng, 1.2, 1.6);
    target[1] = uniform::<T>(rng, -0.6, -0.2);

    let x_star = target.map(|t| t.clamp(T::zero(), T::one()));
    let mut tau = DVector::<T>::zeros(2 * d);
    for i in 0..d {
        tau[i] = diag[i] * (target[i] - T::one()).max(T::zero());
        tau[d + i] = diag[i] * (-target[i]).max(T::zero());
    }
    let x0 = DVector::from_fn(d, |_, _| uniform::<T>(rng, -500.0, 500.0));

    let quad = QuadParts { target: target.clone(), diag: Some(diag.clone()) };
    let q_grad = QuadParts { target, diag: Some(diag.clone()) };
    ProblemInstance::new(
        format!("analytic-{index}-wide-box-qp"),
        d,
        0,
        2 * d,
        Box::new(move |x| quad.value(x)),
        Box::new(move |x| q_grad.grad(x)),
        Box::new(|_x| DVector::zeros(0)),
        Box::new(move |_x| DMatrix::zeros(0, d)),
        Box::new(move |x| {
            let mut h = DVector::zeros(2 * d);
            for i in 0..d {
                h[i] = x[i] - T::one();
                h[d + i] = -x[i];
            }
            h
        }),
        Box::new(move |_x| {
            let mut j = DMatrix::zeros(2 * d, d);
            for i in 0..d {
                j[(i, i)] = T::one();
                j[(d + i, i)] = -T::one();
            }
            j
        }),
        x0,
    )
    .with_hess_f(Box::new(move |_x| DMatrix::from_diagonal(&diag)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
    )
    .with_known_solution(x_star, DVector::zeros(0), tau)
}
