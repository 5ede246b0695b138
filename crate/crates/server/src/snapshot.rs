use std::collections::BTreeMap;

use chrono::NaiveDate;
use tweetminer::corpus::{apply_filter, load_path, Corpus, CorpusFilter};
use tweetminer::dynamics::transactions_by_day;
use tweetminer::market::{load_ohlcv_csv, PriceSeries};
use tweetminer::tokenizer::{load_stopwords, term_stats, to_transactions, TermStats, TokenConfig, Transaction};

use crate::config::AnalysisConfig;
use crate::error::{Stage, StageError};

/// Everything loaded from the input files, immutable once built.
#[derive(Debug)]
pub struct Snapshot {
    pub config: AnalysisConfig,
    pub corpus: Corpus,
    pub transactions: Vec<Transaction>,
    pub by_day: BTreeMap<NaiveDate, Vec<Transaction>>,
    pub term_stats: TermStats,
    pub markets: BTreeMap<String, PriceSeries>,
}

impl Snapshot {
    pub fn load(config: &AnalysisConfig) -> Result<Self, StageError> {
        config.validate()?;
        let raw = load_path(&config.corpus_path).map_err(|e| StageError::from_corpus(Stage::Corpus, e))?;
        let mut filter = CorpusFilter::new().keywords(&config.keywords);
        if !config.users.is_empty() {
            filter = filter.users(&config.users);
        }
        let corpus = apply_filter(&raw, &filter);

        let token_config = match &config.stopwords_path {
            Some(path) => TokenConfig::with_stopwords(
                load_stopwords(path).map_err(|e| StageError::from_corpus(Stage::Tokenize, e))?,
            ),
            None => TokenConfig::default(),
        };
        let transactions = to_transactions(&corpus, &token_config);
        let by_day = transactions_by_day(&transactions);
        let term_stats = term_stats(&transactions);

        let markets = config
            .market_paths
            .iter()
            .map(|(symbol, path)| {
                load_ohlcv_csv(path, symbol)
                    .map(|s| (symbol.clone(), s))
                    .map_err(StageError::from_market)
            })
            .collect::<Result<_, _>>()?;

        Ok(Snapshot {
            config: config.clone(),
            corpus,
            transactions,
            by_day,
            term_stats,
            markets,
        })
    }

    pub fn market(&self, symbol: &str) -> Result<&PriceSeries, StageError> {
        self.markets.get(&symbol.to_uppercase()).ok_or_else(|| {
            StageError::usage(Stage::Market, "unknown_symbol", format!("no price data for symbol {symbol:?}"))
        })
    }
}
