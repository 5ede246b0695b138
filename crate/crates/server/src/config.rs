//! `key = value` configuration file.
//!
//! ```text
//! # tweets and prices
//! corpus = data/tweets.jsonl
//! market.AAPL = data/aapl.csv
//! min_support = 0.01
//! ```
//!
//! Relative paths are resolved against the file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tweetminer::dynamics::{AlignMode, DEFAULT_LONG_WINDOW, DEFAULT_SHORT_WINDOW};
use tweetminer::miner::DEFAULT_MAX_LEN;

use crate::error::{Stage, StageError};

/// Granger input for the price side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    Price,
    Returns,
}

impl std::str::FromStr for Transform {
    type Err = StageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "price" => Ok(Transform::Price),
            "returns" => Ok(Transform::Returns),
            other => Err(StageError::usage(
                Stage::Request,
                "invalid_transform",
                format!("transform must be price or returns, got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub corpus_path: PathBuf,
    pub stopwords_path: Option<PathBuf>,
    pub market_paths: BTreeMap<String, PathBuf>,
    /// Corpus filter: match-any keywords (empty keeps everything).
    pub keywords: Vec<String>,
    pub users: Vec<String>,
    pub min_support: f64,
    pub min_confidence: f64,
    pub max_len: usize,
    pub short_window: usize,
    pub long_window: usize,
    pub lag_order: usize,
    pub max_lag: usize,
    pub transform: Transform,
    pub align_mode: AlignMode,
    pub forecast_p: usize,
    pub forecast_d: usize,
    pub forecast_horizon: usize,
    pub port: u16,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            corpus_path: PathBuf::new(),
            stopwords_path: None,
            market_paths: BTreeMap::new(),
            keywords: Vec::new(),
            users: Vec::new(),
            min_support: 0.01,
            min_confidence: 0.5,
            max_len: DEFAULT_MAX_LEN,
            short_window: DEFAULT_SHORT_WINDOW,
            long_window: DEFAULT_LONG_WINDOW,
            lag_order: 1,
            max_lag: 10,
            transform: Transform::Price,
            align_mode: AlignMode::Drop,
            forecast_p: 1,
            forecast_d: 1,
            forecast_horizon: 10,
            port: 8080,
        }
    }
}

fn config_err(line: usize, message: impl Into<String>) -> StageError {
    StageError::usage(Stage::Config, "invalid_config", format!("line {line}: {}", message.into()))
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, StageError> {
    value
        .parse()
        .map_err(|_| config_err(line, format!("{key}: cannot parse {value:?}")))
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_lowercase())
        .filter(|s| !s.is_empty())
        .collect()
}

impl AnalysisConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, StageError> {
        let mut cfg = AnalysisConfig::default();
        let resolve = |p: &str| -> PathBuf {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base_dir.join(p)
            }
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "corpus" | "corpus_path" => cfg.corpus_path = resolve(value),
                "stopwords" | "stopwords_path" => cfg.stopwords_path = Some(resolve(value)),
                "keywords" => cfg.keywords = list(value),
                "users" => cfg.users = list(value),
                "min_support" => cfg.min_support = parse_num(line, key, value)?,
                "min_confidence" => cfg.min_confidence = parse_num(line, key, value)?,
                "max_len" => cfg.max_len = parse_num(line, key, value)?,
                "short_window" => cfg.short_window = parse_num(line, key, value)?,
                "long_window" => cfg.long_window = parse_num(line, key, value)?,
                "lag_order" => cfg.lag_order = parse_num(line, key, value)?,
                "max_lag" => cfg.max_lag = parse_num(line, key, value)?,
                "transform" => cfg.transform = value.parse().map_err(|e: StageError| config_err(line, e.message))?,
                "align_mode" => {
                    cfg.align_mode = value.parse().map_err(|e: tweetminer::DynamicsError| config_err(line, e.to_string()))?
                }
                "forecast_p" => cfg.forecast_p = parse_num(line, key, value)?,
                "forecast_d" => cfg.forecast_d = parse_num(line, key, value)?,
                "forecast_horizon" => cfg.forecast_horizon = parse_num(line, key, value)?,
                "port" => cfg.port = parse_num(line, key, value)?,
                _ => match key.strip_prefix("market.") {
                    Some(symbol) if !symbol.is_empty() => {
                        cfg.market_paths.insert(symbol.to_uppercase(), resolve(value));
                    }
                    _ => return Err(config_err(line, format!("unknown key {key:?}"))),
                },
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, StageError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            StageError::new(
                Stage::Config,
                crate::error::ErrorKind::Data,
                "io",
                format!("cannot read {}: {e}", path.display()),
            )
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Range checks for every numeric field.
    pub fn validate(&self) -> Result<(), StageError> {
        let bad = |msg: String| Err(StageError::usage(Stage::Config, "invalid_config", msg));
        if self.corpus_path.as_os_str().is_empty() {
            return bad("corpus path is not set".into());
        }
        if !(0.0..1.0).contains(&self.min_support) {
            return bad(format!("min_support {} outside [0, 1)", self.min_support));
        }
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return bad(format!("min_confidence {} outside [0, 1]", self.min_confidence));
        }
        if self.max_len == 0 {
            return bad("max_len must be at least 1".into());
        }
        if self.short_window == 0 || self.short_window >= self.long_window {
            return bad(format!(
                "need 1 <= short_window < long_window, got {} and {}",
                self.short_window, self.long_window
            ));
        }
        if self.lag_order == 0 {
            return bad("lag_order must be at least 1".into());
        }
        if self.forecast_horizon == 0 {
            return bad("forecast_horizon must be at least 1".into());
        }
        Ok(())
    }
}
