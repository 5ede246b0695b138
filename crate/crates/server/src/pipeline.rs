//! End-to-end run: load, tokenize, mine, follow one itemset's support
//! against one symbol, then cross-correlate and test for causality.

use serde::Serialize;
use tweetminer::miner::{Itemset, MiningResult};

use crate::analysis::{self, CcfView, GrangerView, MiningParams, SeriesView};
use crate::config::AnalysisConfig;
use crate::error::StageError;
use crate::snapshot::Snapshot;

/// Result of one stage that does not abort the run when it fails.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", content = "result", rename_all = "lowercase")]
pub enum StageOutcome<T> {
    Ok(T),
    Error(StageError),
}

impl<T> StageOutcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            StageOutcome::Ok(v) => Some(v),
            StageOutcome::Error(_) => None,
        }
    }

    pub fn err(&self) -> Option<&StageError> {
        match self {
            StageOutcome::Ok(_) => None,
            StageOutcome::Error(e) => Some(e),
        }
    }
}

impl<T> From<Result<T, StageError>> for StageOutcome<T> {
    fn from(r: Result<T, StageError>) -> Self {
        match r {
            Ok(v) => StageOutcome::Ok(v),
            Err(e) => StageOutcome::Error(e),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub tweets: usize,
    pub transactions: usize,
    pub days: usize,
    pub source_digest: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub itemset: Itemset,
    pub symbol: String,
    pub corpus: CorpusSummary,
    pub mining: MiningResult,
    pub series: SeriesView,
    pub ccf: StageOutcome<CcfView>,
    pub granger: StageOutcome<GrangerView>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Loading, mining and the support series are fatal; CCF and Granger
/// failures are recorded in the report.
pub fn run_pipeline(config: &AnalysisConfig, itemset: &Itemset, symbol: &str) -> Result<AnalysisReport, StageError> {
    let snap = Snapshot::load(config)?;
    report(&snap, itemset, symbol)
}

pub fn report(snap: &Snapshot, itemset: &Itemset, symbol: &str) -> Result<AnalysisReport, StageError> {
    let cfg = &snap.config;
    let market = snap.market(symbol)?;
    let mining = analysis::itemsets(snap, MiningParams::from_config(snap))?;
    let series = analysis::series(snap, itemset, cfg.short_window, cfg.long_window, Some(symbol))?;
    let ccf = analysis::ccf(snap, itemset, symbol, cfg.short_window, cfg.max_lag).into();
    let granger = analysis::granger(snap, itemset, symbol, cfg.lag_order, cfg.transform).into();
    Ok(AnalysisReport {
        itemset: itemset.clone(),
        symbol: market.symbol.clone(),
        corpus: CorpusSummary {
            tweets: snap.corpus.len(),
            transactions: snap.transactions.len(),
            days: snap.by_day.len(),
            source_digest: snap.corpus.source_digest().to_string(),
        },
        mining,
        series,
        ccf,
        granger,
    })
}
