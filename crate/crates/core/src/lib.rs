//! Mining microblog messages for frequent keyword sets and relating their
//! daily support to stock prices.
//!
//! Pipeline: [`corpus`] loads and filters tweets, [`tokenizer`] turns them into
//! term transactions, [`miner`] finds frequent itemsets and association rules,
//! [`dynamics`] follows an itemset's daily support against a [`market`] price
//! series, and [`inference`] runs the Granger test and AR forecasts.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`, which is what the server uses.

pub mod corpus;
pub mod dynamics;
pub mod inference;
pub mod market;
pub mod miner;
mod scalar;
pub mod tokenizer;

pub use scalar::Scalar;

pub use corpus::{apply_filter, bucket_by_day, load_csv, load_jsonl, load_path, Corpus, CorpusError, CorpusFilter, Tweet};
pub use dynamics::{align, ccf, crossover_signals, ma_pair, sma, support_series, AlignMode, Direction, DynamicsError, Signal};
pub use inference::{ar_fit, ar_forecast, f_upper_tail, granger_test, ols_fit, InferenceError};
pub use market::{close_series, load_ohlcv_csv, log_returns, Bar, MarketError, PriceSeries};
pub use miner::{generate_rules, mine_frequent, support, term_associations, AssociationRule, Itemset, MinerError, MiningResult};
pub use tokenizer::{normalize_text, term_stats, to_transactions, TermStats, TokenConfig, Transaction};

pub type SupportSeries64 = dynamics::SupportSeries<f64>;
pub type MaPair64 = dynamics::MaPair<f64>;
pub type CcfResult64 = dynamics::CcfResult<f64>;
pub type OlsFit64 = inference::OlsFit<f64>;
pub type GrangerResult64 = inference::GrangerResult<f64>;
pub type ArModel64 = inference::ArModel<f64>;
pub type ForecastPoint64 = inference::ForecastPoint<f64>;

pub type SupportSeries32 = dynamics::SupportSeries<f32>;
pub type GrangerResult32 = inference::GrangerResult<f32>;
pub type ArModel32 = inference::ArModel<f32>;
