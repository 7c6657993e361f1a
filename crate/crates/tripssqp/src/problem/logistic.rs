//! Constrained logistic regression.
//!
//! ```text
//! min (1/N) Σ log(1 + exp(-yᵢ zᵢᵀx))   s.t.  Ax = b,  ‖x‖² ≤ c
//! ```
//!
//! with `A ∈ ℝ^{5×d}` and `b ∈ ℝ⁵` standard normal (`A` regenerated until it
//! has full row rank) and `c = 1 + σ²` for a standard normal draw `σ`, so
//! `c ≥ 1`. Datasets are synthetic (normal or exponential class features) or
//! ingested from CSV. Per-sample evaluators are exposed so the subsampling
//! oracle can draw mini-batches.

use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};

use super::csv_data::load_csv_dataset;
use super::{PerSampleEvals, ProblemInstance};
use crate::error::{Error, Result};
use crate::rng::{stream, StreamDomain};
use crate::scalar::{real, real_usize, Scalar};

pub const NUM_EQUALITIES: usize = 5;
const RANK_ATTEMPTS: usize = 100;
const MIN_SINGULAR_VALUE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetKind {
    NormalSynthetic,
    ExponentialSynthetic,
    CsvFile {
        path: PathBuf,
        label_column: String,
    },
}

#[derive(Debug, Clone)]
pub struct LogisticProblemConfig<T: Scalar> {
    pub dataset: DatasetKind,
    pub dim: usize,
    pub n_samples: usize,
    /// Equality constraint matrix, full row rank.
    pub a: DMatrix<T>,
    pub b: DVector<T>,
    /// Radius bound in `‖x‖² ≤ c`; always `≥ 1`.
    pub c_radius: T,
    pub seed: u64,
}

fn draw_constraints<T: Scalar>(
    dim: usize,
    seed: u64,
) -> Result<(DMatrix<T>, DVector<T>, T)> {
    let mut rng = stream(seed, 0, StreamDomain::ProblemGen(11));
    let mut a = None;
    for _ in 0..RANK_ATTEMPTS {
        let cand = DMatrix::<f64>::from_fn(NUM_EQUALITIES, dim, |_, _| {
            rng.sample::<f64, _>(StandardNormal)
        });
        let svd = cand.clone().svd(false, false);
        let min_sv = svd.singular_values.iter().cloned().fold(f64::MAX, f64::min);
        if min_sv > MIN_SINGULAR_VALUE {
            a = Some(cand);
            break;
        }
    }
    let a = a.ok_or(Error::Rank {
        attempts: RANK_ATTEMPTS,
    })?;
    let b = DVector::<f64>::from_fn(NUM_EQUALITIES, |_, _| rng.sample(StandardNormal));
    let sigma: f64 = rng.sample(StandardNormal);
    let c_radius = 1.0 + sigma * sigma;
    Ok((
        a.map(|v| real::<T>(v)),
        b.map(|v| real::<T>(v)),
        real::<T>(c_radius),
    ))
}

impl<T: Scalar> LogisticProblemConfig<T> {
    /// Synthetic dataset configuration; `kind` must be one of the synthetic
    /// variants. `dim` must exceed the five equality constraints.
    pub fn synthetic(kind: DatasetKind, dim: usize, n_samples: usize, seed: u64) -> Result<Self> {
        if matches!(kind, DatasetKind::CsvFile { .. }) {
            return Err(Error::Config(
                "use LogisticProblemConfig::from_csv for csv datasets".into(),
            ));
        }
        if dim <= NUM_EQUALITIES {
            return Err(Error::Config(format!(
                "logistic problems need dim > {NUM_EQUALITIES}, got {dim}"
            )));
        }
        if n_samples < 2 {
            return Err(Error::Config("need at least two samples".into()));
        }
        let (a, b, c_radius) = draw_constraints(dim, seed)?;
        Ok(LogisticProblemConfig {
            dataset: kind,
            dim,
            n_samples,
            a,
            b,
            c_radius,
            seed,
        })
    }

    /// Configuration backed by a local CSV file; the feature dimension is
    /// read from the file.
    pub fn from_csv(path: PathBuf, label_column: String, seed: u64) -> Result<Self> {
        let (features, _labels) = load_csv_dataset::<T>(&path, &label_column)?;
        let dim = features.ncols();
        let n = features.nrows();
        if dim <= NUM_EQUALITIES {
            return Err(Error::Config(format!(
                "csv dataset has {dim} usable feature columns, need more than {NUM_EQUALITIES}"
            )));
        }
        let (a, b, c_radius) = draw_constraints(dim, seed)?;
        Ok(LogisticProblemConfig {
            dataset: DatasetKind::CsvFile { path, label_column },
            dim,
            n_samples: n,
            a,
            b,
            c_radius,
            seed,
        })
    }
}

struct LogisticData<T: Scalar> {
    /// Row `i` is sample `zᵢ`.
    features: DMatrix<T>,
    labels: DVector<T>,
}

impl<T: Scalar> LogisticData<T> {
    fn n(&self) -> usize {
        self.features.nrows()
    }

    /// `u = yᵢ zᵢᵀ x`.
    fn margin(&self, x: &DVector<T>, i: usize) -> T {
        let mut dot = T::zero();
        for j in 0..self.features.ncols() {
            dot += self.features[(i, j)] * x[j];
        }
        self.labels[i] * dot
    }

    /// `log(1 + exp(-u))`, overflow-safe.
    fn loss(u: T) -> T {
        if u >= T::zero() {
            (-u).exp().ln_1p()
        } else {
            -u + u.exp().ln_1p()
        }
    }

    /// `σ(-u) = 1 / (1 + exp(u))`, overflow-safe.
    fn sigmoid_neg(u: T) -> T {
        if u >= T::zero() {
            let e = (-u).exp();
            e / (T::one() + e)
        } else {
            T::one() / (T::one() + u.exp())
        }
    }

    fn sample_value(&self, x: &DVector<T>, i: usize) -> T {
        Self::loss(self.margin(x, i))
    }

    fn sample_grad(&self, x: &DVector<T>, i: usize) -> DVector<T> {
        let u = self.margin(x, i);
        let w = -self.labels[i] * Self::sigmoid_neg(u);
        DVector::from_fn(self.features.ncols(), |j, _| w * self.features[(i, j)])
    }

    fn sample_hess(&self, x: &DVector<T>, i: usize) -> DMatrix<T> {
        let u = self.margin(x, i);
        let sn = Self::sigmoid_neg(u);
        let w = sn * (T::one() - sn);
        let d = self.features.ncols();
        DMatrix::from_fn(d, d, |r, c| w * self.features[(i, r)] * self.features[(i, c)])
    }

    fn value(&self, x: &DVector<T>) -> T {
        let mut acc = T::zero();
        for i in 0..self.n() {
            acc += self.sample_value(x, i);
        }
        acc / real_usize::<T>(self.n())
    }

    fn grad(&self, x: &DVector<T>) -> DVector<T> {
        let mut acc = DVector::zeros(self.features.ncols());
        for i in 0..self.n() {
            acc += self.sample_grad(x, i);
        }
        acc / real_usize::<T>(self.n())
    }

    fn hess(&self, x: &DVector<T>) -> DMatrix<T> {
        let d = self.features.ncols();
        let mut acc = DMatrix::zeros(d, d);
        for i in 0..self.n() {
            acc += self.sample_hess(x, i);
        }
        acc / real_usize::<T>(self.n())
    }
}

fn synthetic_data<T: Scalar>(
    kind: &DatasetKind,
    dim: usize,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> LogisticData<T> {
    let n_pos = n / 2;
    let exp_dist = Exp::new(1.0).expect("rate 1");
    let features = DMatrix::from_fn(n, dim, |i, _| {
        let positive_class = i < n_pos;
        let v: f64 = match kind {
            DatasetKind::NormalSynthetic => {
                let z: f64 = rng.sample(StandardNormal);
                if positive_class {
                    z
                } else {
                    5.0 + z
                }
            }
            DatasetKind::ExponentialSynthetic => {
                let e: f64 = rng.sample(exp_dist);
                if positive_class {
                    e
                } else {
                    5.0 + e
                }
            }
            DatasetKind::CsvFile { .. } => unreachable!("csv handled separately"),
        };
        real::<T>(v)
    });
    let labels = DVector::from_fn(n, |i, _| if i < n_pos { T::one() } else { -T::one() });
    LogisticData { features, labels }
}

/// Builds the constrained logistic-regression instance described by `config`
/// (`m = 5` linear equalities, one ball inequality `‖x‖² - c ≤ 0`).
pub fn make_logistic_problem<T: Scalar>(
    config: &LogisticProblemConfig<T>,
) -> Result<ProblemInstance<T>> {
    let data = match &config.dataset {
        DatasetKind::CsvFile { path, label_column } => {
            let (features, labels) = load_csv_dataset::<T>(path, label_column)?;
            LogisticData { features, labels }
        }
        kind => {
            let mut rng = stream(config.seed, 1, StreamDomain::ProblemGen(12));
            synthetic_data(kind, config.dim, config.n_samples, &mut rng)
        }
    };
    let d = data.features.ncols();
    let n_data = data.n();
    if n_data == 0 {
        return Err(Error::EmptyDataset);
    }
    if d != config.dim {
        return Err(Error::Config(format!(
            "dataset dimension {d} does not match configured dim {}",
            config.dim
        )));
    }

    let data = Arc::new(data);
    let a_mat = config.a.clone();
    let b_vec = config.b.clone();
    let c_radius = config.c_radius;

    let mut x0_rng = stream(config.seed, 2, StreamDomain::ProblemGen(13));
    let x0 = DVector::from_fn(d, |_, _| real::<T>(x0_rng.sample::<f64, _>(StandardNormal)));

    let (d1, d2, d3) = (data.clone(), data.clone(), data.clone());
    let (ps1, ps2, ps3) = (data.clone(), data.clone(), data);
    let (a1, a2) = (a_mat.clone(), a_mat);

    let name = match &config.dataset {
        DatasetKind::NormalSynthetic => "logistic-normal".to_string(),
        DatasetKind::ExponentialSynthetic => "logistic-exponential".to_string(),
        DatasetKind::CsvFile { path, .. } => format!(
            "logistic-csv-{}",
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "data".into())
        ),
    };

    let problem = ProblemInstance::new(
        name,
        d,
        NUM_EQUALITIES,
        1,
        Box::new(move |x| d1.value(x)),
        Box::new(move |x| d2.grad(x)),
        Box::new(move |x| &a1 * x - &b_vec),
        Box::new(move |_x| a2.clone()),
        Box::new(move |x| DVector::from_element(1, x.norm_squared() - c_radius)),
        Box::new(move |x| {
            let mut j = DMatrix::zeros(1, d);
            for i in 0..d {
                j[(0, i)] = real::<T>(2.0) * x[i];
            }
            j
        }),
        x0,
    )
    .with_hess_f(Box::new(move |x| d3.hess(x)))
    .with_constraint_hessians(
        Box::new(move |_x, _i| DMatrix::zeros(d, d)),
        Box::new(move |_x, _i| DMatrix::identity(d, d) * real::<T>(2.0)),
    )
    .with_per_sample(PerSampleEvals {
        count: n_data,
        value: Box::new(move |x, i| ps1.sample_value(x, i)),
        grad: Box::new(move |x, i| ps2.sample_grad(x, i)),
        hess: Some(Box::new(move |x, i| ps3.sample_hess(x, i))),
    });
    Ok(problem)
}
