//! Per-day support of an itemset, moving averages and their crossovers, date
//! alignment with market series, and the cross-correlation function.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::miner::Itemset;
use crate::scalar::Scalar;
use crate::tokenizer::Transaction;

pub const DEFAULT_SHORT_WINDOW: usize = 5;
pub const DEFAULT_LONG_WINDOW: usize = 20;

/// A value observed on a calendar date.
pub type Dated<S> = (NaiveDate, S);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("no days to build a series from")]
    EmptyInput,
    #[error("moving-average window must be at least 1")]
    InvalidWindow,
    #[error("short window {short} must be smaller than long window {long}")]
    WindowOrder { short: usize, long: usize },
    #[error("series lengths differ ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("max lag {max_lag} must be below the series length {n}")]
    LagTooLarge { max_lag: usize, n: usize },
    #[error("{0} series has zero variance")]
    ZeroVariance(&'static str),
    #[error("unknown align mode {0:?}")]
    UnknownAlignMode(String),
}

impl DynamicsError {
    pub fn code(&self) -> &'static str {
        match self {
            DynamicsError::EmptyInput => "empty_input",
            DynamicsError::InvalidWindow | DynamicsError::WindowOrder { .. } => "invalid_window",
            DynamicsError::LengthMismatch { .. } => "length_mismatch",
            DynamicsError::TooShort(_) => "too_short",
            DynamicsError::LagTooLarge { .. } => "invalid_lag",
            DynamicsError::ZeroVariance(_) => "zero_variance",
            DynamicsError::UnknownAlignMode(_) => "invalid_align_mode",
        }
    }

    /// Statistical degeneracy, as opposed to a bad request.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, DynamicsError::ZeroVariance(_) | DynamicsError::TooShort(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportPoint<S> {
    pub date: NaiveDate,
    pub support: S,
    pub n_transactions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSeries<S> {
    pub itemset: Itemset,
    pub points: Vec<SupportPoint<S>>,
}

impl<S: Scalar> SupportSeries<S> {
    pub fn values(&self) -> Vec<Dated<S>> {
        self.points.iter().map(|p| (p.date, p.support)).collect()
    }
}

pub fn transactions_by_day(transactions: &[Transaction]) -> BTreeMap<NaiveDate, Vec<Transaction>> {
    let mut days: BTreeMap<NaiveDate, Vec<Transaction>> = BTreeMap::new();
    for tx in transactions {
        days.entry(tx.date).or_default().push(tx.clone());
    }
    days
}

/// How tweet days without a trading session are treated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignMode {
    /// Non-trading days are dropped by the inner join.
    #[default]
    Drop,
    /// Non-trading days are merged into the next trading day.
    RollForward,
}

impl FromStr for AlignMode {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop" => Ok(AlignMode::Drop),
            "roll_forward" => Ok(AlignMode::RollForward),
            other => Err(DynamicsError::UnknownAlignMode(other.to_string())),
        }
    }
}

impl fmt::Display for AlignMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlignMode::Drop => "drop",
            AlignMode::RollForward => "roll_forward",
        })
    }
}

/// Reassigns each day's transactions to the first trading date on or after
/// it. Days after the last trading date are dropped.
pub fn roll_forward_days(
    by_day: &BTreeMap<NaiveDate, Vec<Transaction>>,
    trading_dates: &[NaiveDate],
) -> BTreeMap<NaiveDate, Vec<Transaction>> {
    let mut out: BTreeMap<NaiveDate, Vec<Transaction>> = BTreeMap::new();
    for (day, txs) in by_day {
        let idx = trading_dates.partition_point(|d| d < day);
        if let Some(&target) = trading_dates.get(idx) {
            out.entry(target).or_default().extend(txs.iter().cloned());
        }
    }
    out
}

/// Daily support of `itemset`: one point per day that has transactions.
pub fn support_series<S: Scalar>(
    by_day: &BTreeMap<NaiveDate, Vec<Transaction>>,
    itemset: &Itemset,
) -> Result<SupportSeries<S>, DynamicsError> {
    if by_day.values().all(Vec::is_empty) {
        return Err(DynamicsError::EmptyInput);
    }
    let points = by_day
        .iter()
        .filter(|(_, txs)| !txs.is_empty())
        .map(|(&date, txs)| {
            let containing = txs.iter().filter(|t| t.contains_all(itemset.terms())).count();
            SupportPoint {
                date,
                support: S::from_usize_lossy(containing) / S::from_usize_lossy(txs.len()),
                n_transactions: txs.len(),
            }
        })
        .collect();
    Ok(SupportSeries {
        itemset: itemset.clone(),
        points,
    })
}

/// Simple moving average over series positions (not calendar days). The
/// output starts at the `window`-th point; a window longer than the series
/// yields nothing.
pub fn sma<S: Scalar>(series: &[Dated<S>], window: usize) -> Result<Vec<Dated<S>>, DynamicsError> {
    if window == 0 {
        return Err(DynamicsError::InvalidWindow);
    }
    let w = S::from_usize_lossy(window);
    Ok(series
        .windows(window)
        .map(|win| {
            let (lo, hi, sum) = win.iter().fold(
                (S::infinity(), S::neg_infinity(), S::zero()),
                |(lo, hi, sum), &(_, v)| (lo.min(v), hi.max(v), sum + v),
            );
            // keep the mean inside the window's range despite rounding
            (win[window - 1].0, (sum / w).max(lo).min(hi))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaPair<S> {
    pub short_window: usize,
    pub long_window: usize,
    pub short_ma: Vec<Dated<S>>,
    pub long_ma: Vec<Dated<S>>,
}

pub fn ma_pair<S: Scalar>(series: &[Dated<S>], short_window: usize, long_window: usize) -> Result<MaPair<S>, DynamicsError> {
    if short_window == 0 {
        return Err(DynamicsError::InvalidWindow);
    }
    if short_window >= long_window {
        return Err(DynamicsError::WindowOrder {
            short: short_window,
            long: long_window,
        });
    }
    Ok(MaPair {
        short_window,
        long_window,
        short_ma: sma(series, short_window)?,
        long_ma: sma(series, long_window)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signal {
    pub date: NaiveDate,
    pub direction: Direction,
}

/// Crossings of the short average through the long one on their common
/// dates. The regime is "above" while short > long and "not above"
/// otherwise; each regime change emits one signal, so directions alternate.
pub fn crossover_signals<S: Scalar>(ma: &MaPair<S>) -> Vec<Signal> {
    let joined = align(&ma.short_ma, &ma.long_ma);
    let mut signals = Vec::new();
    let Some(&(_, s0, l0)) = joined.first() else {
        return signals;
    };
    let mut above = s0 > l0;
    for &(date, s, l) in &joined[1..] {
        let now = s > l;
        if now != above {
            signals.push(Signal {
                date,
                direction: if now { Direction::Up } else { Direction::Down },
            });
            above = now;
        }
    }
    signals
}

/// Inner join on exact date equality, ascending. Inputs must be sorted.
pub fn align<A: Copy, B: Copy>(a: &[Dated<A>], b: &[Dated<B>]) -> Vec<(NaiveDate, A, B)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1, b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Cross-correlation by lag; `values[i]` belongs to `lags[i]` and estimates
/// corr(x[t + lag], y[t]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcfResult<S> {
    pub lags: Vec<i64>,
    pub values: Vec<S>,
}

impl<S: Scalar> CcfResult<S> {
    pub fn at(&self, lag: i64) -> Option<S> {
        self.lags.iter().position(|&l| l == lag).map(|i| self.values[i])
    }

    /// Lag with the largest correlation (first one on ties).
    pub fn argmax(&self) -> i64 {
        let mut best = 0;
        for i in 1..self.values.len() {
            if self.values[i] > self.values[best] {
                best = i;
            }
        }
        self.lags[best]
    }
}

fn moments<S: Scalar>(v: &[S]) -> (S, S) {
    let n = S::from_usize_lossy(v.len());
    let mean = v.iter().fold(S::zero(), |a, &b| a + b) / n;
    let var = v.iter().fold(S::zero(), |a, &b| a + (b - mean) * (b - mean)) / n;
    (mean, var.sqrt())
}

/// Sample cross-correlation for lags `-max_lag..=max_lag`, normalized by the
/// full-sample means and population standard deviations at every lag.
pub fn ccf<S: Scalar>(x: &[S], y: &[S], max_lag: usize) -> Result<CcfResult<S>, DynamicsError> {
    if x.len() != y.len() {
        return Err(DynamicsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    let n = x.len();
    if n < 2 {
        return Err(DynamicsError::TooShort(n));
    }
    if max_lag >= n {
        return Err(DynamicsError::LagTooLarge { max_lag, n });
    }
    let (mx, sx) = moments(x);
    let (my, sy) = moments(y);
    if sx <= S::zero() {
        return Err(DynamicsError::ZeroVariance("x"));
    }
    if sy <= S::zero() {
        return Err(DynamicsError::ZeroVariance("y"));
    }
    let denom = S::from_usize_lossy(n) * sx * sy;
    let max_lag = max_lag as i64;
    let lags: Vec<i64> = (-max_lag..=max_lag).collect();
    let values = lags
        .iter()
        .map(|&k| {
            let (lo, hi) = if k >= 0 { (0, n as i64 - k) } else { (-k, n as i64) };
            let sum = (lo..hi).fold(S::zero(), |acc, t| {
                acc + (x[(t + k) as usize] - mx) * (y[t as usize] - my)
            });
            sum / denom
        })
        .collect();
    Ok(CcfResult { lags, values })
}

/// Writes `date,value` CSV with six decimal places.
pub fn write_series_csv<S: Scalar, W: io::Write>(series: &[Dated<S>], mut out: W) -> io::Result<()> {
    writeln!(out, "date,value")?;
    for (date, v) in series {
        writeln!(out, "{},{:.6}", date.format("%Y-%m-%d"), v.to_f64_lossy())?;
    }
    Ok(())
}
