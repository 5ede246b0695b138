use serde::{Deserialize, Serialize};

use super::InferenceError;
use crate::scalar::{rank_tolerance, Scalar};

/// Dense column-major regressor matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix<S> {
    rows: usize,
    columns: Vec<Vec<S>>,
}

impl<S: Scalar> DesignMatrix<S> {
    pub fn from_columns(columns: Vec<Vec<S>>) -> Result<Self, InferenceError> {
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(InferenceError::DimensionMismatch {
                expected: rows,
                got: bad.len(),
            });
        }
        Ok(DesignMatrix { rows, columns })
    }

    /// Prepends a column of ones.
    pub fn with_intercept(regressors: Vec<Vec<S>>, rows: usize) -> Result<Self, InferenceError> {
        let mut columns = Vec::with_capacity(regressors.len() + 1);
        columns.push(vec![S::one(); rows]);
        columns.extend(regressors);
        Self::from_columns(columns)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[S] {
        &self.columns[j]
    }

    pub fn mul_vec(&self, b: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.rows];
        for (col, &bj) in self.columns.iter().zip(b) {
            for (o, &x) in out.iter_mut().zip(col) {
                *o = *o + x * bj;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit<S> {
    /// Intercept (first design column) first.
    pub coefficients: Vec<S>,
    pub residuals: Vec<S>,
    pub rss: S,
    pub n_obs: usize,
    pub n_params: usize,
}

impl<S> OlsFit<S> {
    pub fn residual_df(&self) -> usize {
        self.n_obs - self.n_params
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Least squares by Householder QR.
///
/// A column whose component orthogonal to the preceding columns is below
/// the rank tolerance (relative to the largest column norm) is reported as
/// the dependent column.
pub fn ols_fit<S: Scalar>(y: &[S], x: &DesignMatrix<S>) -> Result<OlsFit<S>, InferenceError> {
    let (m, p) = (x.rows(), x.cols());
    if y.len() != m {
        return Err(InferenceError::DimensionMismatch { expected: m, got: y.len() });
    }
    if p == 0 || m <= p {
        return Err(InferenceError::TooFewRows { rows: m, cols: p });
    }
    if y.iter().chain(x.columns.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(InferenceError::NonFinite);
    }

    let scale = x
        .columns
        .iter()
        .map(|c| dot(c, c).sqrt())
        .fold(S::zero(), S::max);
    let tol = rank_tolerance::<S>() * scale;

    let mut a = x.columns.clone();
    let mut qty = y.to_vec();
    let mut diag = vec![S::zero(); p];
    for j in 0..p {
        let norm = dot(&a[j][j..], &a[j][j..]).sqrt();
        if norm.is_nan() || norm <= tol {
            return Err(InferenceError::RankDeficient { column: j });
        }
        let alpha = if a[j][j] > S::zero() { -norm } else { norm };
        let mut v = a[j][j..].to_vec();
        v[0] = v[0] - alpha;
        let vv = dot(&v, &v);
        let two = S::lit(2.0);
        let reflect = |col: &mut [S]| {
            let f = two * dot(&v, col) / vv;
            for (c, &vi) in col.iter_mut().zip(&v) {
                *c = *c - f * vi;
            }
        };
        for col in a.iter_mut().skip(j + 1) {
            reflect(&mut col[j..]);
        }
        reflect(&mut qty[j..]);
        diag[j] = alpha;
    }

    let mut coefficients = vec![S::zero(); p];
    for i in (0..p).rev() {
        let mut s = qty[i];
        for k in i + 1..p {
            s = s - a[k][i] * coefficients[k];
        }
        coefficients[i] = s / diag[i];
    }

    let fitted = x.mul_vec(&coefficients);
    let residuals: Vec<S> = y.iter().zip(&fitted).map(|(&yi, &fi)| yi - fi).collect();
    let rss = dot(&residuals, &residuals);
    Ok(OlsFit {
        coefficients,
        residuals,
        rss,
        n_obs: m,
        n_params: p,
    })
}
