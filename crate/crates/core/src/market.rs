//! Daily OHLCV bars loaded from CSV and the price series derived from them.

use std::io;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::Dated;
use crate::scalar::Scalar;

pub const CSV_HEADER: [&str; 6] = ["date", "open", "high", "low", "close", "volume"];

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error("row {row}: {reason}")]
    InvalidBar { row: usize, reason: String },
    #[error("duplicate date {date} at rows {first} and {second}")]
    DuplicateDate { date: NaiveDate, first: usize, second: usize },
    #[error("no price rows")]
    Empty,
    #[error("non-positive value at position {0}")]
    NonPositive(usize),
    #[error("need at least 2 prices, got {0}")]
    TooShort(usize),
    #[error("quote fetch failed: {0}")]
    Fetch(String),
}

impl MarketError {
    pub fn code(&self) -> &'static str {
        match self {
            MarketError::Io { .. } => "io",
            MarketError::Malformed { .. } => "malformed_row",
            MarketError::InvalidBar { .. } => "invalid_bar",
            MarketError::DuplicateDate { .. } => "duplicate_date",
            MarketError::Empty => "empty_series",
            MarketError::NonPositive(_) => "non_positive",
            MarketError::TooShort(_) => "too_short",
            MarketError::Fetch(_) => "fetch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: u64,
}

impl Bar {
    /// Checks positivity and the candle envelope (low ≤ open, close ≤ high).
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("open", self.open), ("high", self.high), ("low", self.low), ("close", self.close)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be a positive finite price, got {v}"));
            }
        }
        if self.low > self.high {
            return Err(format!("low {} above high {}", self.low, self.high));
        }
        if self.low > self.open.min(self.close) || self.high < self.open.max(self.close) {
            return Err("open/close outside the low..high range".into());
        }
        Ok(())
    }
}

/// Source of bars other than local files.
pub trait QuoteClient {
    fn fetch_bars(&self, symbol: &str, start: NaiveDate, end: NaiveDate) -> Result<Vec<Bar>, MarketError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub symbol: String,
    pub bars: Vec<Bar>,
}

impl PriceSeries {
    /// Validates and sorts bars; rows in errors are 1-based input positions.
    pub fn from_bars(symbol: impl Into<String>, bars: Vec<Bar>) -> Result<Self, MarketError> {
        Self::from_numbered(symbol.into(), bars.into_iter().enumerate().map(|(i, b)| (i + 1, b)).collect())
    }

    fn from_numbered(symbol: String, mut rows: Vec<(usize, Bar)>) -> Result<Self, MarketError> {
        for (row, bar) in &rows {
            bar.validate().map_err(|reason| MarketError::InvalidBar { row: *row, reason })?;
        }
        rows.sort_by_key(|(row, b)| (b.date, *row));
        if let Some(w) = rows.windows(2).find(|w| w[0].1.date == w[1].1.date) {
            return Err(MarketError::DuplicateDate {
                date: w[0].1.date,
                first: w[0].0.min(w[1].0),
                second: w[0].0.max(w[1].0),
            });
        }
        Ok(PriceSeries {
            symbol,
            bars: rows.into_iter().map(|(_, b)| b).collect(),
        })
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.bars.iter().map(|b| b.date).collect()
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    date: String,
    open: f64,
    high: f64,
    low: f64,
    close: f64,
    volume: u64,
}

/// Loads bars from a CSV with header `date,open,high,low,close,volume`.
/// Row numbers in errors are 1-based file lines (the header is line 1).
pub fn load_ohlcv_csv(path: impl AsRef<Path>, symbol: &str) -> Result<PriceSeries, MarketError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| MarketError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_ohlcv_csv(bytes.as_slice(), symbol)
}

pub fn read_ohlcv_csv(input: impl io::Read, symbol: &str) -> Result<PriceSeries, MarketError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(|e| MarketError::Malformed {
        row: 1,
        message: e.to_string(),
    })?;
    if header.is_empty() {
        return Err(MarketError::Empty);
    }
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(MarketError::Malformed {
            row: 1,
            message: format!("header must be {}", CSV_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let r = record.map_err(|e| MarketError::Malformed {
            row: line,
            message: e.to_string(),
        })?;
        let date = NaiveDate::parse_from_str(r.date.trim(), "%Y-%m-%d").map_err(|e| MarketError::Malformed {
            row: line,
            message: format!("date {:?}: {e}", r.date),
        })?;
        rows.push((
            line,
            Bar {
                date,
                open: r.open,
                high: r.high,
                low: r.low,
                close: r.close,
                volume: r.volume,
            },
        ));
    }
    if rows.is_empty() {
        return Err(MarketError::Empty);
    }
    PriceSeries::from_numbered(symbol.to_string(), rows)
}

/// Writes bars in the loader's format; prices use the shortest decimal that
/// parses back to the same value.
pub fn write_ohlcv_csv<W: io::Write>(series: &PriceSeries, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", CSV_HEADER.join(","))?;
    for b in &series.bars {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            b.date.format("%Y-%m-%d"),
            b.open,
            b.high,
            b.low,
            b.close,
            b.volume
        )?;
    }
    Ok(())
}

pub fn close_series(series: &PriceSeries) -> Vec<Dated<f64>> {
    series.bars.iter().map(|b| (b.date, b.close)).collect()
}

pub fn volume_series(series: &PriceSeries) -> Vec<Dated<f64>> {
    series.bars.iter().map(|b| (b.date, b.volume as f64)).collect()
}

/// `ln(v[i+1] / v[i])`, dated at the later observation.
pub fn log_returns<S: Scalar>(series: &[Dated<S>]) -> Result<Vec<Dated<S>>, MarketError> {
    if let Some(i) = series.iter().position(|&(_, v)| v.is_nan() || v <= S::zero()) {
        return Err(MarketError::NonPositive(i));
    }
    if series.len() < 2 {
        return Err(MarketError::TooShort(series.len()));
    }
    Ok(series.windows(2).map(|w| (w[1].0, (w[1].1 / w[0].1).ln())).collect())
}
