//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide error enum. Variants carry enough context to name the
/// offending quantity in CLI messages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("invalid parameter: {context}")]
    InvalidParam { context: String },

    #[error("rank deficient: {context}")]
    RankDeficient { context: String },

    #[error("rows are not orthonormal (max deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("singular matrix: {context}")]
    Singular { context: String },

    #[error("no-cloning bound violated: n = {n} >= 2k = {two_k}; a (k, n) scheme requires k <= n <= 2k - 1")]
    NoCloning { k: usize, n: usize, two_k: usize },

    #[error("index {index} out of range (< {bound} expected)")]
    BadIndex { index: usize, bound: usize },

    #[error("bad subset: {context}")]
    BadSubset { context: String },

    #[error("cannot drop {dropped} of {n} shares: fewer than k = {k} would remain")]
    TooManyDropped { k: usize, n: usize, dropped: usize },

    #[error("no valid encoding found after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("expansion coefficients are inconsistent (residual {residual:.3e})")]
    InconsistentExpansion { residual: f64 },

    #[error("kappa = (1 - alpha^2 - beta^2) / (1 - alpha^2) is undefined at alpha^2 = 1")]
    KappaUndefined,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI assigns to this error.
    ///
    /// 2 flags a no-cloning violation, 3 a rank or singularity failure,
    /// everything else maps to the generic usage code 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoCloning { .. } => 2,
            Error::RankDeficient { .. } | Error::Singular { .. } => 3,
            _ => 1,
        }
    }
}
