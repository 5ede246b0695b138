use std::fmt;

use serde::Serialize;
use tweetminer::{CorpusError, DynamicsError, InferenceError, MarketError, MinerError};

/// Pipeline stage an error originated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Request,
    Corpus,
    Tokenize,
    Mine,
    Rules,
    Series,
    Market,
    Align,
    Ccf,
    Granger,
    Forecast,
    Graph,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("stage serializes");
        f.write_str(s.as_str().unwrap_or("unknown"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid parameters or configuration.
    Usage,
    /// Input files missing or malformed.
    Data,
    /// Zero variance, rank deficiency and similar statistical dead ends.
    Degenerate,
}

/// Structured error: `{stage, code, message}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageError {
    pub stage: Stage,
    pub code: String,
    pub message: String,
    #[serde(skip)]
    pub kind: ErrorKind,
}

impl StageError {
    pub fn new(stage: Stage, kind: ErrorKind, code: impl Into<String>, message: impl Into<String>) -> Self {
        StageError {
            stage,
            code: code.into(),
            message: message.into(),
            kind,
        }
    }

    pub fn usage(stage: Stage, code: &str, message: impl Into<String>) -> Self {
        Self::new(stage, ErrorKind::Usage, code, message)
    }

    pub fn degenerate(stage: Stage, code: &str, message: impl Into<String>) -> Self {
        Self::new(stage, ErrorKind::Degenerate, code, message)
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Usage => 2,
            ErrorKind::Data => 3,
            ErrorKind::Degenerate => 4,
        }
    }

    pub fn http_status(&self) -> u16 {
        match self.kind {
            ErrorKind::Usage => 400,
            ErrorKind::Degenerate => 422,
            ErrorKind::Data => 500,
        }
    }

    pub fn from_corpus(stage: Stage, e: CorpusError) -> Self {
        let kind = match e {
            CorpusError::InvertedRange { .. } => ErrorKind::Usage,
            _ => ErrorKind::Data,
        };
        Self::new(stage, kind, e.code(), e.to_string())
    }

    pub fn from_market(e: MarketError) -> Self {
        let kind = match e {
            MarketError::NonPositive(_) | MarketError::TooShort(_) => ErrorKind::Degenerate,
            _ => ErrorKind::Data,
        };
        Self::new(Stage::Market, kind, e.code(), e.to_string())
    }

    pub fn from_miner(stage: Stage, e: MinerError) -> Self {
        let kind = match e {
            MinerError::EmptyTransactions => ErrorKind::Degenerate,
            _ => ErrorKind::Usage,
        };
        Self::new(stage, kind, e.code(), e.to_string())
    }

    pub fn from_dynamics(stage: Stage, e: DynamicsError) -> Self {
        let kind = if e.is_degenerate() || e == DynamicsError::EmptyInput {
            ErrorKind::Degenerate
        } else {
            ErrorKind::Usage
        };
        Self::new(stage, kind, e.code(), e.to_string())
    }

    pub fn from_inference(stage: Stage, e: InferenceError) -> Self {
        let kind = if e.is_degenerate() {
            ErrorKind::Degenerate
        } else {
            ErrorKind::Usage
        };
        Self::new(stage, kind, e.code(), e.to_string())
    }
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.stage, self.code, self.message)
    }
}

impl std::error::Error for StageError {}
