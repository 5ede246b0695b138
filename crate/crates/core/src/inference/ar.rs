//! Autoregressive forecasting on a differenced series.

use serde::{Deserialize, Serialize};

use super::ols::{ols_fit, DesignMatrix};
use super::InferenceError;
use crate::scalar::Scalar;

/// Two-sided 95% normal quantile used for forecast intervals.
pub const Z_95: f64 = 1.96;

/// Applies first differencing `d` times.
pub fn difference<S: Scalar>(series: &[S], d: usize) -> Result<Vec<S>, InferenceError> {
    if series.len() <= d {
        return Err(InferenceError::SeriesTooShort {
            len: series.len(),
            need: d + 1,
        });
    }
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Last value of each differencing level `0..d` of `series`: the constants
/// needed to integrate a continuation of the `d`-th differences.
pub fn integration_anchors<S: Scalar>(series: &[S], d: usize) -> Result<Vec<S>, InferenceError> {
    (0..d)
        .map(|k| difference(series, k).map(|v| *v.last().expect("non-empty")))
        .collect()
}

/// Inverse of [`difference`]: rebuilds a series from its `d`-th differences
/// and the first value of every lower level (`initial[k]` = first value of
/// the k-times differenced series).
pub fn integrate<S: Scalar>(diffs: &[S], initial: &[S]) -> Vec<S> {
    let mut out = diffs.to_vec();
    for &start in initial.iter().rev() {
        let mut level = Vec::with_capacity(out.len() + 1);
        level.push(start);
        for &v in &out {
            let prev = *level.last().expect("seeded");
            level.push(prev + v);
        }
        out = level;
    }
    out
}

/// Continues `anchors` (last values per level, see [`integration_anchors`])
/// with future `d`-th differences, returning future levels.
fn integrate_forward<S: Scalar>(future_diffs: &[S], anchors: &[S]) -> Vec<S> {
    let mut out = future_diffs.to_vec();
    for &last in anchors.iter().rev() {
        let mut acc = last;
        for v in out.iter_mut() {
            acc = acc + *v;
            *v = acc;
        }
    }
    out
}

fn cumulate<S: Scalar>(weights: &mut [S], times: usize) {
    for _ in 0..times {
        let mut acc = S::zero();
        for w in weights.iter_mut() {
            acc = acc + *w;
            *w = acc;
        }
    }
}

/// `y_t = intercept + Σ phi[i] · y_{t-1-i}` on the `d`-times differenced scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel<S> {
    pub p: usize,
    pub d: usize,
    pub intercept: S,
    pub phi: Vec<S>,
    pub sigma2: S,
}

impl<S: Scalar> ArModel<S> {
    pub fn new(intercept: S, phi: Vec<S>, d: usize, sigma2: S) -> Self {
        ArModel {
            p: phi.len(),
            d,
            intercept,
            phi,
            sigma2,
        }
    }

    /// One-step prediction from the most recent values (`recent[0]` newest).
    fn step(&self, recent: impl Iterator<Item = S>) -> S {
        self.phi.iter().zip(recent).fold(self.intercept, |acc, (&w, v)| acc + w * v)
    }

    /// Impulse-response weights ψ₀..ψ_{h-1} on the level scale.
    pub fn psi_weights(&self, horizon: usize) -> Vec<S> {
        let mut psi = Vec::with_capacity(horizon);
        for j in 0..horizon {
            let v = if j == 0 {
                S::one()
            } else {
                (1..=j.min(self.p)).fold(S::zero(), |acc, i| acc + self.phi[i - 1] * psi[j - i])
            };
            psi.push(v);
        }
        cumulate(&mut psi, self.d);
        psi
    }
}

/// Differences `d` times, then regresses each value on an intercept and its
/// `p` predecessors. `sigma2` is rss over residual degrees of freedom.
pub fn ar_fit<S: Scalar>(series: &[S], p: usize, d: usize) -> Result<ArModel<S>, InferenceError> {
    if series.len() < d + p + 5 {
        return Err(InferenceError::SeriesTooShort {
            len: series.len(),
            need: d + p + 5,
        });
    }
    let z = difference(series, d)?;
    let rows = z.len() - p;
    let lags = (1..=p).map(|lag| (p..z.len()).map(|t| z[t - lag]).collect()).collect();
    let fit = ols_fit(&z[p..], &DesignMatrix::with_intercept(lags, rows)?)?;
    let sigma2 = fit.rss / S::from_usize_lossy(fit.residual_df());
    Ok(ArModel {
        p,
        d,
        intercept: fit.coefficients[0],
        phi: fit.coefficients[1..].to_vec(),
        sigma2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastPoint<S> {
    pub point: S,
    pub lower95: S,
    pub upper95: S,
}

/// Point forecasts and 95% intervals for the next `horizon` levels after
/// `history`.
pub fn ar_forecast<S: Scalar>(model: &ArModel<S>, history: &[S], horizon: usize) -> Result<Vec<ForecastPoint<S>>, InferenceError> {
    if horizon == 0 {
        return Err(InferenceError::InvalidArgument("forecast horizon must be at least 1"));
    }
    let need = (model.d + model.p).max(1);
    if history.len() < need || (model.d > 0 && history.len() <= model.d) {
        return Err(InferenceError::SeriesTooShort {
            len: history.len(),
            need: need.max(model.d + 1),
        });
    }
    let mut z = if model.p > 0 {
        difference(history, model.d)?
    } else {
        Vec::new()
    };
    let start = z.len();
    for _ in 0..horizon {
        let next = model.step(z.iter().rev().copied());
        z.push(next);
    }
    let anchors = integration_anchors(history, model.d)?;
    let points = integrate_forward(&z[start..], &anchors);

    let z95 = S::lit(Z_95);
    let mut cum = S::zero();
    Ok(points
        .into_iter()
        .zip(model.psi_weights(horizon))
        .map(|(point, psi)| {
            cum = cum + psi * psi;
            let half = z95 * (model.sigma2 * cum).sqrt();
            ForecastPoint {
                point,
                lower95: point - half,
                upper95: point + half,
            }
        })
        .collect())
}
