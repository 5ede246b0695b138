//! Query parameters to JSON bodies. The HTTP handlers and the CLI both go
//! through [`handle`], so the two always print the same bytes.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;
use tweetminer::miner::Itemset;

use crate::analysis::{self, GraphKind, MiningParams};
use crate::error::{Stage, StageError};
use crate::snapshot::Snapshot;

pub const DEFAULT_TERMS_LIMIT: usize = 50;
pub const DEFAULT_MIN_CORR: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Terms,
    Associations,
    Itemsets,
    Rules,
    Series,
    Market,
    Ccf,
    Granger,
    Forecast,
    Graph,
}

impl Endpoint {
    pub const ALL: [Endpoint; 10] = [
        Endpoint::Terms,
        Endpoint::Associations,
        Endpoint::Itemsets,
        Endpoint::Rules,
        Endpoint::Series,
        Endpoint::Market,
        Endpoint::Ccf,
        Endpoint::Granger,
        Endpoint::Forecast,
        Endpoint::Graph,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Endpoint::Terms => "terms",
            Endpoint::Associations => "associations",
            Endpoint::Itemsets => "itemsets",
            Endpoint::Rules => "rules",
            Endpoint::Series => "series",
            Endpoint::Market => "market",
            Endpoint::Ccf => "ccf",
            Endpoint::Granger => "granger",
            Endpoint::Forecast => "forecast",
            Endpoint::Graph => "graph",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.set(key, value.to_string());
        self
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str).filter(|v| !v.is_empty())
    }

    pub fn required(&self, key: &str) -> Result<&str, StageError> {
        self.raw(key).ok_or_else(|| {
            StageError::usage(Stage::Request, "missing_parameter", format!("parameter {key:?} is required"))
        })
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, StageError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                StageError::usage(Stage::Request, "invalid_parameter", format!("cannot parse {key}={v:?}"))
            }),
        }
    }

    pub fn itemset(&self) -> Result<Itemset, StageError> {
        self.required("itemset")?
            .parse()
            .map_err(|e| StageError::from_miner(Stage::Request, e))
    }

    fn mining(&self, snap: &Snapshot) -> Result<MiningParams, StageError> {
        let defaults = MiningParams::from_config(snap);
        Ok(MiningParams {
            min_support: self.get_or("min_support", defaults.min_support)?,
            max_len: self.get_or("max_len", defaults.max_len)?,
        })
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Params {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Params(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("response serializes")
}

pub fn handle(snap: &Snapshot, endpoint: Endpoint, params: &Params) -> Result<String, StageError> {
    let cfg = &snap.config;
    Ok(match endpoint {
        Endpoint::Terms => json(&analysis::terms(snap, params.get_or("limit", DEFAULT_TERMS_LIMIT)?)),
        Endpoint::Associations => json(&analysis::associations(
            snap,
            params.required("term")?,
            params.get_or("min_corr", DEFAULT_MIN_CORR)?,
        )?),
        Endpoint::Itemsets => json(&analysis::itemsets(snap, params.mining(snap)?)?),
        Endpoint::Rules => json(&analysis::rules(
            snap,
            params.mining(snap)?,
            params.get_or("min_confidence", cfg.min_confidence)?,
        )?),
        Endpoint::Series => json(&analysis::series(
            snap,
            &params.itemset()?,
            params.get_or("short", cfg.short_window)?,
            params.get_or("long", cfg.long_window)?,
            params.raw("symbol"),
        )?),
        Endpoint::Market => json(snap.market(params.required("symbol")?)?),
        Endpoint::Ccf => json(&analysis::ccf(
            snap,
            &params.itemset()?,
            params.required("symbol")?,
            params.get_or("short", cfg.short_window)?,
            params.get_or("max_lag", cfg.max_lag)?,
        )?),
        Endpoint::Granger => json(&analysis::granger(
            snap,
            &params.itemset()?,
            params.required("symbol")?,
            params.get_or("lag", cfg.lag_order)?,
            params.get_or("transform", cfg.transform)?,
        )?),
        Endpoint::Forecast => json(&analysis::forecast(
            snap,
            params.required("symbol")?,
            params.get_or("p", cfg.forecast_p)?,
            params.get_or("d", cfg.forecast_d)?,
            params.get_or("h", cfg.forecast_horizon)?,
        )?),
        Endpoint::Graph => json(&analysis::graph(
            snap,
            params.get_or("kind", GraphKind::Itemsets)?,
            params.mining(snap)?,
            params.get_or("min_confidence", cfg.min_confidence)?,
        )?),
    })
}
