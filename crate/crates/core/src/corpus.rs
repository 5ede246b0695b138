//! Tweet ingestion: loading, keyword/user/date filtering and day bucketing.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::tokenizer::{normalize_text, TokenConfig};

/// Upper bound on message length, in code points.
pub const MAX_TEXT_CHARS: usize = 1000;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unparseable timestamp {value:?}")]
    Timestamp { line: usize, value: String },
    #[error("date range start {start} is after end {end}")]
    InvertedRange {
        start: DateTime<Utc>,
        end: DateTime<Utc>,
    },
    #[error("fetch failed: {0}")]
    Fetch(String),
}

impl CorpusError {
    pub fn code(&self) -> &'static str {
        match self {
            CorpusError::Io { .. } => "io",
            CorpusError::Malformed { .. } => "malformed_record",
            CorpusError::Timestamp { .. } => "bad_timestamp",
            CorpusError::InvertedRange { .. } => "invalid_range",
            CorpusError::Fetch(_) => "fetch",
        }
    }
}

/// One microblog message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub author: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
}

impl Tweet {
    pub fn date(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }
}

/// Raw record shape shared by the file loaders and [`FetchClient`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub created_at: String,
    pub user: String,
    pub text: String,
}

impl TweetRecord {
    fn into_tweet(self, line: usize) -> Result<Tweet, CorpusError> {
        if self.id.is_empty() {
            return Err(CorpusError::Malformed {
                line,
                message: "empty id".into(),
            });
        }
        if self.text.chars().count() > MAX_TEXT_CHARS {
            return Err(CorpusError::Malformed {
                line,
                message: format!("text longer than {MAX_TEXT_CHARS} code points"),
            });
        }
        let timestamp = parse_timestamp(&self.created_at).ok_or_else(|| CorpusError::Timestamp {
            line,
            value: self.created_at.clone(),
        })?;
        Ok(Tweet {
            id: self.id,
            author: self.user,
            timestamp,
            text: self.text,
        })
    }
}

/// Source of tweet records other than local files (e.g. a network client).
pub trait FetchClient {
    fn fetch(&self, users: &[String], since_id: Option<&str>) -> Result<Vec<TweetRecord>, CorpusError>;
}

/// Parses an ISO-8601 instant. Values without an offset are taken as UTC;
/// sub-second precision is truncated.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    let dt = if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        dt.with_timezone(&Utc)
    } else if let Some(dt) = ["%Y-%m-%dT%H:%M:%S%.f%z", "%Y-%m-%d %H:%M:%S%.f%z", "%Y-%m-%d %H:%M:%S%.f%:z"]
        .iter()
        .find_map(|f| DateTime::parse_from_str(s, f).ok())
    {
        dt.with_timezone(&Utc)
    } else if let Some(naive) = ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
    {
        naive.and_utc()
    } else {
        NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .ok()?
            .and_hms_opt(0, 0, 0)?
            .and_utc()
    };
    DateTime::from_timestamp(dt.timestamp(), 0)
}

/// Immutable, ordered set of tweets.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Corpus {
    tweets: Vec<Tweet>,
    source_digest: String,
}

impl Corpus {
    /// Builds a corpus, keeping the first occurrence of each id and sorting
    /// by `(timestamp, id)`.
    pub fn from_tweets(tweets: impl IntoIterator<Item = Tweet>, source_digest: impl Into<String>) -> Self {
        let mut seen = HashSet::new();
        let mut tweets: Vec<Tweet> = tweets.into_iter().filter(|t| seen.insert(t.id.clone())).collect();
        tweets.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
        Corpus {
            tweets,
            source_digest: source_digest.into(),
        }
    }

    /// Builds a corpus from fetched records; `line` in errors is the record's
    /// 1-based position.
    pub fn from_records(records: Vec<TweetRecord>, source_digest: impl Into<String>) -> Result<Self, CorpusError> {
        let tweets = records
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.into_tweet(i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_tweets(tweets, source_digest))
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    /// Hex SHA-256 of the loaded file contents.
    pub fn source_digest(&self) -> &str {
        &self.source_digest
    }

    fn with_tweets(&self, tweets: Vec<Tweet>) -> Corpus {
        Corpus {
            tweets,
            source_digest: self.source_digest.clone(),
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CorpusError> {
    fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Loads a JSON-lines file with one `{id, created_at, user, text}` record per
/// non-blank line. Unknown fields are ignored.
pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let bytes = read_file(path.as_ref())?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CorpusError::Malformed {
        line: bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1,
        message: "invalid UTF-8".into(),
    })?;
    let mut tweets = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TweetRecord = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        tweets.push(record.into_tweet(i + 1)?);
    }
    Ok(Corpus::from_tweets(tweets, digest(&bytes)))
}

/// Loads a CSV file with header exactly `id,created_at,user,text`.
/// Errors report the 1-based file line of the offending record.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let bytes = read_file(path.as_ref())?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes.as_slice());
    let header = reader.headers().map_err(|e| CorpusError::Malformed {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != ["id", "created_at", "user", "text"] {
        return Err(CorpusError::Malformed {
            line: 1,
            message: "header must be id,created_at,user,text".into(),
        });
    }
    let mut tweets = Vec::new();
    for result in reader.deserialize::<TweetRecord>() {
        match result {
            Ok(record) => {
                let line = tweets.len() + 2;
                tweets.push(record.into_tweet(line)?);
            }
            Err(e) => {
                let line = e.position().map_or(tweets.len() + 2, |p| p.line() as usize);
                return Err(CorpusError::Malformed {
                    line,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(Corpus::from_tweets(tweets, digest(&bytes)))
}

/// Dispatches on extension: `.csv` goes to [`load_csv`], anything else to
/// [`load_jsonl`].
pub fn load_path(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => load_csv(path),
        _ => load_jsonl(path),
    }
}

/// Selection of the messages to analyse. Empty keywords match everything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFilter {
    keywords: BTreeSet<String>,
    users: Option<BTreeSet<String>>,
    date_range: Option<(DateTime<Utc>, DateTime<Utc>)>,
}

impl CorpusFilter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn keywords<I, T>(mut self, keywords: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        self.keywords = keywords.into_iter().map(|k| k.as_ref().to_lowercase()).collect();
        self
    }

    /// Author names are compared case-insensitively.
    pub fn users<I, T>(mut self, users: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        self.users = Some(users.into_iter().map(|u| u.as_ref().to_lowercase()).collect());
        self
    }

    /// Inclusive interval.
    pub fn date_range(mut self, start: DateTime<Utc>, end: DateTime<Utc>) -> Result<Self, CorpusError> {
        if start > end {
            return Err(CorpusError::InvertedRange { start, end });
        }
        self.date_range = Some((start, end));
        Ok(self)
    }

    pub fn keyword_set(&self) -> &BTreeSet<String> {
        &self.keywords
    }

    pub fn matches(&self, tweet: &Tweet) -> bool {
        if let Some((start, end)) = self.date_range {
            if tweet.timestamp < start || tweet.timestamp > end {
                return false;
            }
        }
        if let Some(users) = &self.users {
            if !users.contains(&tweet.author.to_lowercase()) {
                return false;
            }
        }
        if self.keywords.is_empty() {
            return true;
        }
        normalize_text(&tweet.text, &TokenConfig::matching())
            .iter()
            .any(|t| self.keywords.contains(t))
    }
}

/// Tweets containing at least one keyword as a whole token, restricted to the
/// filter's users and date range when given.
pub fn apply_filter(corpus: &Corpus, filter: &CorpusFilter) -> Corpus {
    corpus.with_tweets(corpus.tweets.iter().filter(|t| filter.matches(t)).cloned().collect())
}

/// Partitions the corpus by UTC calendar date.
pub fn bucket_by_day(corpus: &Corpus) -> BTreeMap<NaiveDate, Vec<Tweet>> {
    let mut buckets: BTreeMap<NaiveDate, Vec<Tweet>> = BTreeMap::new();
    for tweet in &corpus.tweets {
        buckets.entry(tweet.date()).or_default().push(tweet.clone());
    }
    buckets
}
