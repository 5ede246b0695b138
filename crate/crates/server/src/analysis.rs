//! Query layer shared by the CLI and the HTTP service. Each function takes a
//! snapshot plus parameters and returns a serializable view; the numbers
//! come from the core library only.

use chrono::NaiveDate;
use serde::Serialize;
use tweetminer::dynamics::{self, AlignMode, Dated, Signal, SupportPoint};
use tweetminer::inference::{self, format_granger_pair, ArModel, GrangerResult};
use tweetminer::market::{close_series, log_returns, PriceSeries};
use tweetminer::miner::{self, AssociationRule, Graph, Itemset, MiningResult};
use tweetminer::tokenizer::RankedTerm;

use crate::config::Transform;
use crate::error::{Stage, StageError};
use crate::snapshot::Snapshot;

#[derive(Debug, Clone, Serialize)]
pub struct TermsView {
    pub n_transactions: usize,
    pub terms: Vec<RankedTerm>,
}

pub fn terms(snap: &Snapshot, limit: usize) -> TermsView {
    TermsView {
        n_transactions: snap.term_stats.n_transactions,
        terms: snap.term_stats.top(limit),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Association {
    pub term: String,
    pub correlation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssociationsView {
    pub term: String,
    pub min_corr: f64,
    pub associations: Vec<Association>,
}

pub fn associations(snap: &Snapshot, term: &str, min_corr: f64) -> Result<AssociationsView, StageError> {
    let term = term.trim().to_lowercase();
    let found = miner::term_associations(&snap.transactions, &term, min_corr)
        .map_err(|e| StageError::from_miner(Stage::Mine, e))?;
    Ok(AssociationsView {
        term,
        min_corr,
        associations: found
            .into_iter()
            .map(|(term, correlation)| Association { term, correlation })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiningParams {
    pub min_support: f64,
    pub max_len: usize,
}

impl MiningParams {
    pub fn from_config(snap: &Snapshot) -> Self {
        MiningParams {
            min_support: snap.config.min_support,
            max_len: snap.config.max_len,
        }
    }
}

pub fn itemsets(snap: &Snapshot, params: MiningParams) -> Result<MiningResult, StageError> {
    miner::mine_frequent(&snap.transactions, params.min_support, params.max_len)
        .map_err(|e| StageError::from_miner(Stage::Mine, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct RulesView {
    pub min_support: f64,
    pub max_len: usize,
    pub min_confidence: f64,
    pub rules: Vec<AssociationRule>,
}

pub fn rules(snap: &Snapshot, params: MiningParams, min_confidence: f64) -> Result<RulesView, StageError> {
    let mined = itemsets(snap, params)?;
    let rules = miner::generate_rules(&mined, min_confidence).map_err(|e| StageError::from_miner(Stage::Rules, e))?;
    Ok(RulesView {
        min_support: params.min_support,
        max_len: params.max_len,
        min_confidence,
        rules,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Itemsets,
    Rules,
}

impl std::str::FromStr for GraphKind {
    type Err = StageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "itemsets" => Ok(GraphKind::Itemsets),
            "rules" => Ok(GraphKind::Rules),
            other => Err(StageError::usage(
                Stage::Request,
                "invalid_kind",
                format!("graph kind must be itemsets or rules, got {other:?}"),
            )),
        }
    }
}

pub fn graph(snap: &Snapshot, kind: GraphKind, params: MiningParams, min_confidence: f64) -> Result<Graph, StageError> {
    Ok(match kind {
        GraphKind::Itemsets => miner::itemset_graph(&itemsets(snap, params)?),
        GraphKind::Rules => miner::rule_graph(&rules(snap, params, min_confidence)?.rules),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesView {
    pub itemset: Itemset,
    pub align_mode: AlignMode,
    pub points: Vec<SupportPoint<f64>>,
    pub short_window: usize,
    pub long_window: usize,
    pub short_ma: Vec<Dated<f64>>,
    pub long_ma: Vec<Dated<f64>>,
    pub signals: Vec<Signal>,
}

/// Daily support of `itemset`; in roll-forward mode with a symbol, tweet
/// days are first merged into that symbol's trading days.
fn support_points(snap: &Snapshot, itemset: &Itemset, market: Option<&PriceSeries>) -> Result<Vec<SupportPoint<f64>>, StageError> {
    let series = match (snap.config.align_mode, market) {
        (AlignMode::RollForward, Some(m)) => {
            let rolled = dynamics::roll_forward_days(&snap.by_day, &m.dates());
            dynamics::support_series(&rolled, itemset)
        }
        _ => dynamics::support_series(&snap.by_day, itemset),
    };
    series
        .map(|s| s.points)
        .map_err(|e| StageError::from_dynamics(Stage::Series, e))
}

pub fn series(snap: &Snapshot, itemset: &Itemset, short: usize, long: usize, symbol: Option<&str>) -> Result<SeriesView, StageError> {
    let market = symbol.map(|s| snap.market(s)).transpose()?;
    let points = support_points(snap, itemset, market)?;
    let values: Vec<Dated<f64>> = points.iter().map(|p| (p.date, p.support)).collect();
    let ma = dynamics::ma_pair(&values, short, long).map_err(|e| StageError::from_dynamics(Stage::Series, e))?;
    Ok(SeriesView {
        itemset: itemset.clone(),
        align_mode: snap.config.align_mode,
        points,
        short_window: short,
        long_window: long,
        signals: dynamics::crossover_signals(&ma),
        short_ma: ma.short_ma,
        long_ma: ma.long_ma,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CcfView {
    pub itemset: Itemset,
    pub symbol: String,
    pub short_window: usize,
    pub n: usize,
    pub max_lag: usize,
    pub convention: &'static str,
    pub lags: Vec<i64>,
    pub values: Vec<f64>,
}

/// Cross-correlation between the short moving average of the itemset's
/// support and the close price, on common dates. `max_lag` is capped at
/// `n - 1`.
pub fn ccf(snap: &Snapshot, itemset: &Itemset, symbol: &str, short: usize, max_lag: usize) -> Result<CcfView, StageError> {
    let market = snap.market(symbol)?;
    let points = support_points(snap, itemset, Some(market))?;
    let values: Vec<Dated<f64>> = points.iter().map(|p| (p.date, p.support)).collect();
    let ma = dynamics::sma(&values, short).map_err(|e| StageError::from_dynamics(Stage::Ccf, e))?;
    let joined = dynamics::align(&ma, &close_series(market));
    let n = joined.len();
    if n < 2 {
        return Err(StageError::degenerate(
            Stage::Align,
            "too_short",
            format!("only {n} common dates between the support average and {symbol}"),
        ));
    }
    let x: Vec<f64> = joined.iter().map(|p| p.1).collect();
    let y: Vec<f64> = joined.iter().map(|p| p.2).collect();
    let max_lag = max_lag.min(n - 1);
    let r = dynamics::ccf(&x, &y, max_lag).map_err(|e| StageError::from_dynamics(Stage::Ccf, e))?;
    Ok(CcfView {
        itemset: itemset.clone(),
        symbol: market.symbol.clone(),
        short_window: short,
        n,
        max_lag,
        convention: "value at lag k estimates corr(support_ma[t+k], close[t])",
        lags: r.lags,
        values: r.values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrangerView {
    pub itemset: Itemset,
    pub symbol: String,
    pub lag: usize,
    pub transform: Transform,
    pub n: usize,
    /// Null hypothesis: support does not Granger-cause the price.
    pub support_causes_price: GrangerResult<f64>,
    /// Null hypothesis: the price does not Granger-cause support.
    pub price_causes_support: GrangerResult<f64>,
    /// Both tests as text tables, support → price first.
    pub report: String,
}

impl GrangerView {
    pub fn support_label(&self) -> String {
        self.itemset.terms().join("_")
    }

    pub fn price_label(&self) -> String {
        match self.transform {
            Transform::Price => self.symbol.clone(),
            Transform::Returns => format!("{}_ret", self.symbol),
        }
    }

    fn render(&self) -> String {
        format_granger_pair(
            &self.support_causes_price,
            &self.price_causes_support,
            &self.price_label(),
            &self.support_label(),
        )
    }
}

fn has_variance(v: &[f64]) -> bool {
    v.iter().any(|&x| x != v[0])
}

/// Granger tests in both directions between the itemset's daily support and
/// the close price (or its log returns) on common dates.
pub fn granger(snap: &Snapshot, itemset: &Itemset, symbol: &str, lag: usize, transform: Transform) -> Result<GrangerView, StageError> {
    let market = snap.market(symbol)?;
    let points = support_points(snap, itemset, Some(market))?;
    let support: Vec<Dated<f64>> = points.iter().map(|p| (p.date, p.support)).collect();
    let closes = close_series(market);
    let price = match transform {
        Transform::Price => closes,
        Transform::Returns => log_returns(&closes).map_err(StageError::from_market)?,
    };
    let joined = dynamics::align(&support, &price);
    let s: Vec<f64> = joined.iter().map(|p| p.1).collect();
    let p: Vec<f64> = joined.iter().map(|p| p.2).collect();
    for (name, v) in [("support", &s), ("price", &p)] {
        if !v.is_empty() && !has_variance(v) {
            return Err(StageError::degenerate(
                Stage::Granger,
                "zero_variance",
                format!("{name} series has zero variance over the {} common dates", v.len()),
            ));
        }
    }
    let test = |effect: &[f64], cause: &[f64]| {
        inference::granger_test(effect, cause, lag).map_err(|e| StageError::from_inference(Stage::Granger, e))
    };
    let mut view = GrangerView {
        itemset: itemset.clone(),
        symbol: market.symbol.clone(),
        lag,
        transform,
        n: joined.len(),
        support_causes_price: test(&p, &s)?,
        price_causes_support: test(&s, &p)?,
        report: String::new(),
    };
    view.report = view.render();
    Ok(view)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForecastStep {
    pub step: usize,
    pub point: f64,
    pub lower95: f64,
    pub upper95: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForecastView {
    pub symbol: String,
    pub last_date: NaiveDate,
    pub model: ArModel<f64>,
    pub forecast: Vec<ForecastStep>,
}

/// AR(p) on the d-times differenced close price, forecast `h` sessions ahead.
pub fn forecast(snap: &Snapshot, symbol: &str, p: usize, d: usize, h: usize) -> Result<ForecastView, StageError> {
    let market = snap.market(symbol)?;
    let closes: Vec<f64> = market.bars.iter().map(|b| b.close).collect();
    let last_date = market.bars.last().map(|b| b.date).ok_or_else(|| {
        StageError::degenerate(Stage::Forecast, "empty_series", format!("no bars for {symbol}"))
    })?;
    let model = inference::ar_fit(&closes, p, d).map_err(|e| StageError::from_inference(Stage::Forecast, e))?;
    let points = inference::ar_forecast(&model, &closes, h).map_err(|e| StageError::from_inference(Stage::Forecast, e))?;
    Ok(ForecastView {
        symbol: market.symbol.clone(),
        last_date,
        model,
        forecast: points
            .into_iter()
            .enumerate()
            .map(|(i, f)| ForecastStep {
                step: i + 1,
                point: f.point,
                lower95: f.lower95,
                upper95: f.upper95,
            })
            .collect(),
    })
}
