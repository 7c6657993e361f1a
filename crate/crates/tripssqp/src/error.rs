//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// `A Aᵀ` (or `G Gᵀ`) is numerically rank deficient at the current
    /// iterate. The solver aborts the run with status `singular` instead of
    /// regularizing, so that regularity violations stay visible.
    #[error("singular constraint block: {0}")]
    SingularConstraint(String),

    /// The merit-parameter loop hit its safety cap without satisfying the
    /// decrease threshold. Indicates a step computation bug or a genuine
    /// regularity violation; never expected on well-posed problems.
    #[error("merit parameter exceeded cap {cap:.1e} without satisfying the decrease threshold")]
    MeritDivergence { cap: f64 },

    /// A sampled or evaluated quantity was NaN/inf.
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    /// A slack entry was non-positive where positivity is required.
    #[error("slack must be strictly positive, got {0}")]
    Domain(f64),

    #[error("csv parse error: {0}")]
    CsvParse(String),

    #[error("dataset is empty")]
    EmptyDataset,

    /// Labels could not be mapped onto {-1, +1}.
    #[error("bad labels: {0}")]
    Label(String),

    /// A generated matrix stayed rank deficient after the allowed number of
    /// regeneration attempts.
    #[error("matrix rank deficient after {attempts} generation attempts")]
    Rank { attempts: usize },

    /// The chosen Hessian construction needs second derivatives the problem
    /// does not provide.
    #[error("hessian model requires second derivatives not provided by problem '{0}'")]
    MissingHessian(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
