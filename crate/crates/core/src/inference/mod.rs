//! Least squares, F-distribution tails, Granger causality and
//! autoregressive forecasting.

pub mod ar;
pub mod fdist;
pub mod granger;
pub mod ols;

use thiserror::Error;

pub use ar::{ar_fit, ar_forecast, difference, integrate, integration_anchors, ArModel, ForecastPoint, Z_95};
pub use fdist::{f_upper_tail, ln_gamma, regularized_incomplete_beta};
pub use granger::{format_granger_pair, format_granger_report, format_significant, granger_test, signif_stars, GrangerResult, SIGNIF_LEGEND};
pub use ols::{ols_fit, DesignMatrix, OlsFit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InferenceError {
    #[error("design matrix is rank deficient: column {column} depends on the preceding columns")]
    RankDeficient { column: usize },
    #[error("need more rows than columns ({rows} x {cols})")]
    TooFewRows { rows: usize, cols: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("series of length {len} too short, need at least {need}")]
    SeriesTooShort { len: usize, need: usize },
    #[error("degrees of freedom must be positive (df1={df1}, df2={df2})")]
    InvalidDf { df1: usize, df2: usize },
    #[error("input contains NaN or infinite values")]
    NonFinite,
    #[error("both models fit exactly; F statistic undefined")]
    PerfectFit,
    #[error("continued fraction did not converge")]
    NoConvergence,
    #[error("{0}")]
    InvalidArgument(&'static str),
}

impl InferenceError {
    pub fn code(&self) -> &'static str {
        match self {
            InferenceError::RankDeficient { .. } => "rank_deficient",
            InferenceError::TooFewRows { .. } => "too_few_rows",
            InferenceError::DimensionMismatch { .. } => "length_mismatch",
            InferenceError::SeriesTooShort { .. } => "too_short",
            InferenceError::InvalidDf { .. } => "invalid_df",
            InferenceError::NonFinite => "non_finite",
            InferenceError::PerfectFit => "perfect_fit",
            InferenceError::NoConvergence => "no_convergence",
            InferenceError::InvalidArgument(_) => "invalid_argument",
        }
    }

    /// Statistical degeneracy of the data rather than a malformed request.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            InferenceError::RankDeficient { .. }
                | InferenceError::TooFewRows { .. }
                | InferenceError::SeriesTooShort { .. }
                | InferenceError::PerfectFit
                | InferenceError::NoConvergence
        )
    }
}
