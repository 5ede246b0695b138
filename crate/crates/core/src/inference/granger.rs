use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::fdist::f_upper_tail;
use super::ols::{ols_fit, DesignMatrix};
use super::InferenceError;
use crate::scalar::Scalar;

/// Nested-model comparison: does adding lags of the cause reduce the
/// residual sum of squares of the effect's own-lag regression?
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult<S> {
    pub lag_order: usize,
    pub f_stat: S,
    pub p_value: S,
    /// Number of restrictions (= lag order).
    pub df1: usize,
    /// Residual degrees of freedom of the unrestricted model.
    pub df2: usize,
    pub rss_restricted: S,
    pub rss_unrestricted: S,
    /// Rows used by both regressions (series length minus lag order).
    pub n_obs: usize,
}

impl<S> GrangerResult<S> {
    pub fn restricted_df(&self) -> usize {
        self.df2 + self.df1
    }
}

/// Columns `series[t - lag]` for `t` in `lag_order..n`, lag = 1..=lag_order.
fn lag_columns<S: Scalar>(series: &[S], lag_order: usize) -> Vec<Vec<S>> {
    let n = series.len();
    (1..=lag_order)
        .map(|lag| (lag_order..n).map(|t| series[t - lag]).collect())
        .collect()
}

/// Tests whether `cause` Granger-causes `effect` with `lag_order` lags.
pub fn granger_test<S: Scalar>(effect: &[S], cause: &[S], lag_order: usize) -> Result<GrangerResult<S>, InferenceError> {
    let n = effect.len();
    if cause.len() != n {
        return Err(InferenceError::DimensionMismatch {
            expected: n,
            got: cause.len(),
        });
    }
    if lag_order == 0 {
        return Err(InferenceError::InvalidArgument("lag order must be at least 1"));
    }
    let params = 2 * lag_order + 1;
    if n <= lag_order || n - lag_order <= params {
        return Err(InferenceError::SeriesTooShort {
            len: n,
            need: lag_order + params + 1,
        });
    }
    if effect.iter().chain(cause).any(|v| !v.is_finite()) {
        return Err(InferenceError::NonFinite);
    }
    let rows = n - lag_order;
    let y = &effect[lag_order..];
    let own = lag_columns(effect, lag_order);
    let mut full = own.clone();
    full.extend(lag_columns(cause, lag_order));

    let unrestricted = ols_fit(y, &DesignMatrix::with_intercept(full, rows)?)?;
    let restricted = ols_fit(y, &DesignMatrix::with_intercept(own, rows)?)?;

    let df1 = lag_order;
    let df2 = unrestricted.residual_df();
    // nested least squares: the unrestricted fit can only be better
    let rss_u = unrestricted.rss;
    let rss_r = restricted.rss.max(rss_u);
    let f_stat = if rss_u > S::zero() {
        ((rss_r - rss_u) / S::from_usize_lossy(df1)) / (rss_u / S::from_usize_lossy(df2))
    } else if rss_r > S::zero() {
        S::infinity()
    } else {
        return Err(InferenceError::PerfectFit);
    };
    Ok(GrangerResult {
        lag_order,
        f_stat,
        p_value: f_upper_tail(f_stat, df1, df2)?,
        df1,
        df2,
        rss_restricted: rss_r,
        rss_unrestricted: rss_u,
        n_obs: rows,
    })
}

/// Significance code for a p-value: `***` < 0.001, `**` < 0.01, `*` < 0.05,
/// `.` < 0.1, otherwise blank.
pub fn signif_stars(p: f64) -> &'static str {
    match p {
        p if p < 0.001 => "***",
        p if p < 0.01 => "**",
        p if p < 0.05 => "*",
        p if p < 0.1 => ".",
        _ => "",
    }
}

pub const SIGNIF_LEGEND: &str = "Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1";

/// Formats with `digits` significant digits, dropping trailing zeros;
/// scientific notation below 1e-4.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    let exp = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&exp) {
        let s = format!("{:.*e}", digits.saturating_sub(1), x);
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        let e: i32 = e.parse().expect("exponent");
        let sign = if e < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim(mantissa.to_string()), e.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim(format!("{x:.decimals$}"))
}

fn format_p_value(p: f64) -> String {
    if p < 2.2e-16 {
        "< 2.2e-16".into()
    } else {
        format_significant(p, 4)
    }
}

/// Text block laid out like the classic two-model Granger table: model
/// formulas, the Res.Df/Df/F/Pr(>F) comparison and, when p < 0.1, a
/// significance column and the legend. Cells are right-aligned, columns
/// separated by one space, padding kept.
pub fn format_granger_report<S: Scalar>(result: &GrangerResult<S>, effect: &str, cause: &str) -> String {
    let l = result.lag_order;
    let f = result.f_stat.to_f64_lossy();
    let p = result.p_value.to_f64_lossy();
    let stars = signif_stars(p);
    let mut header = vec!["".to_string(), "Res.Df".into(), "Df".into(), "F".into(), "Pr(>F)".into()];
    let mut rows = vec![
        vec!["1".to_string(), result.df2.to_string(), String::new(), String::new(), String::new()],
        vec![
            "2".to_string(),
            result.restricted_df().to_string(),
            format!("-{}", result.df1),
            format_significant(f, 4),
            format_p_value(p),
        ],
    ];
    if !stars.is_empty() {
        header.push(String::new());
        rows[0].push(String::new());
        rows[1].push(stars.to_string());
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().chain([&header]).map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| -> String {
        let mut s = format!("{:<w$}", cells[0], w = widths[0]);
        for (c, (cell, w)) in cells.iter().zip(&widths).enumerate().skip(1) {
            if c == 5 {
                let _ = write!(s, " {cell:<w$}");
            } else {
                let _ = write!(s, " {cell:>w$}");
            }
        }
        s
    };

    let mut out = String::new();
    let _ = writeln!(out, "Granger causality test");
    out.push('\n');
    let _ = writeln!(out, "Model 1: {effect} ~ Lags({effect}, 1:{l}) + Lags({cause}, 1:{l})");
    let _ = writeln!(out, "Model 2: {effect} ~ Lags({effect}, 1:{l})");
    let _ = writeln!(out, "{}", line(&header));
    for r in &rows {
        let _ = writeln!(out, "{}", line(r));
    }
    if !stars.is_empty() {
        let _ = writeln!(out, "---");
        let _ = writeln!(out, "{SIGNIF_LEGEND}");
    }
    out
}

/// Both directions as "test 1" (`cause` → `effect`) and "test 2" (the
/// reverse), one blank line between blocks.
pub fn format_granger_pair<S: Scalar>(
    forward: &GrangerResult<S>,
    reverse: &GrangerResult<S>,
    effect: &str,
    cause: &str,
) -> String {
    format!(
        "test 1\n\n{}\ntest 2\n\n{}",
        format_granger_report(forward, effect, cause),
        format_granger_report(reverse, cause, effect)
    )
}
