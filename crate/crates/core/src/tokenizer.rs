//! Text normalization into term transactions and the term-frequency table.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{Corpus, CorpusError};

const BUILTIN_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Parses a stopword list: one word per line, `#` starts a comment.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<HashSet<String>, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_stopwords(&text))
}

pub fn builtin_stopwords() -> Arc<HashSet<String>> {
    static WORDS: OnceLock<Arc<HashSet<String>>> = OnceLock::new();
    WORDS.get_or_init(|| Arc::new(parse_stopwords(BUILTIN_STOPWORDS))).clone()
}

#[derive(Debug, Clone)]
pub struct TokenConfig {
    /// Tokens with fewer code points are dropped.
    pub min_len: usize,
    pub stopwords: Arc<HashSet<String>>,
}

impl Default for TokenConfig {
    fn default() -> Self {
        TokenConfig {
            min_len: 2,
            stopwords: builtin_stopwords(),
        }
    }
}

impl TokenConfig {
    pub fn with_stopwords(stopwords: HashSet<String>) -> Self {
        TokenConfig {
            stopwords: Arc::new(stopwords),
            ..Self::default()
        }
    }

    pub fn without_stopwords() -> Self {
        Self::with_stopwords(HashSet::new())
    }

    /// Keyword matching: no length or stopword pruning.
    pub fn matching() -> Self {
        TokenConfig {
            min_len: 1,
            stopwords: Arc::new(HashSet::new()),
        }
    }
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}')
}

fn is_url(chunk: &str) -> bool {
    chunk.contains("://") || chunk.starts_with("www.")
}

/// Splits text into lowercase alphanumeric tokens.
///
/// URLs and `@mentions` are removed, `#` and `$` act as separators so hashtags
/// and cashtags keep their word, and an apostrophe inside a word drops itself
/// together with the suffix (`apple's` -> `apple`).
pub fn normalize_text(text: &str, config: &TokenConfig) -> Vec<String> {
    let folded: String = text.nfc().collect::<String>().to_lowercase().nfc().collect();
    let mut tokens = Vec::new();
    let mut push = |tok: &mut String| {
        if !tok.is_empty() {
            if tok.chars().count() >= config.min_len && !config.stopwords.contains(tok.as_str()) {
                tokens.push(std::mem::take(tok));
            } else {
                tok.clear();
            }
        }
    };
    for chunk in folded.split_whitespace() {
        if is_url(chunk) {
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let mut tok = String::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_alphanumeric() && !c.is_uppercase() {
                tok.push(c);
                i += 1;
            } else if c.is_uppercase() {
                // letters without a lowercase mapping (e.g. mathematical
                // alphanumerics) fall back to their compatibility form
                let folded: String = std::iter::once(c).nfkc().collect::<String>().to_lowercase();
                if folded.chars().all(|f| f.is_alphanumeric() && !f.is_uppercase()) {
                    tok.push_str(&folded);
                } else {
                    push(&mut tok);
                }
                i += 1;
            } else if c == '@' && tok.is_empty() {
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
            } else if is_apostrophe(c) && !tok.is_empty() && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric()) {
                i += 1;
                while i < chars.len() && chars[i].is_alphanumeric() {
                    i += 1;
                }
            } else {
                push(&mut tok);
                i += 1;
            }
        }
        push(&mut tok);
    }
    tokens
}

/// A tweet as a basket of distinct terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub tweet_id: String,
    pub terms: BTreeSet<String>,
    pub date: NaiveDate,
    /// Raw occurrence count per term, in `terms` order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    occurrences: Vec<u32>,
}

impl Transaction {
    pub fn new<I, T>(tweet_id: impl Into<String>, terms: I, date: NaiveDate) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        Self::from_tokens(tweet_id.into(), terms.into_iter().map(Into::into), date)
    }

    fn from_tokens(tweet_id: String, tokens: impl Iterator<Item = String>, date: NaiveDate) -> Self {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for t in tokens {
            *counts.entry(t).or_default() += 1;
        }
        let occurrences = counts.values().copied().collect();
        Transaction {
            tweet_id,
            terms: counts.into_keys().collect(),
            date,
            occurrences,
        }
    }

    pub fn contains_all<'a>(&self, terms: impl IntoIterator<Item = &'a String>) -> bool {
        terms.into_iter().all(|t| self.terms.contains(t))
    }

    fn occurrence_pairs(&self) -> impl Iterator<Item = (&String, u32)> {
        let fallback = std::iter::repeat(1);
        self.terms
            .iter()
            .zip(self.occurrences.iter().copied().chain(fallback))
    }
}

/// One transaction per tweet, in corpus order. Tweets without surviving
/// tokens become empty transactions.
pub fn to_transactions(corpus: &Corpus, config: &TokenConfig) -> Vec<Transaction> {
    corpus
        .tweets()
        .par_iter()
        .map(|t| {
            Transaction::from_tokens(t.id.clone(), normalize_text(&t.text, config).into_iter(), t.date())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCount {
    pub document_frequency: usize,
    pub total_occurrences: usize,
}

/// Per-term document frequencies (the column sums of the document-term matrix).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermStats {
    pub n_transactions: usize,
    pub terms: BTreeMap<String, TermCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedTerm {
    pub term: String,
    pub document_frequency: usize,
    pub total_occurrences: usize,
}

impl TermStats {
    pub fn get(&self, term: &str) -> Option<TermCount> {
        self.terms.get(term).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Descending document frequency, ties broken lexicographically.
    pub fn ranked(&self) -> Vec<RankedTerm> {
        let mut out: Vec<RankedTerm> = self
            .terms
            .iter()
            .map(|(term, c)| RankedTerm {
                term: term.clone(),
                document_frequency: c.document_frequency,
                total_occurrences: c.total_occurrences,
            })
            .collect();
        out.sort_by(|a, b| b.document_frequency.cmp(&a.document_frequency).then_with(|| a.term.cmp(&b.term)));
        out
    }

    pub fn top(&self, limit: usize) -> Vec<RankedTerm> {
        let mut r = self.ranked();
        r.truncate(limit);
        r
    }
}

pub fn term_stats(transactions: &[Transaction]) -> TermStats {
    let mut terms: BTreeMap<String, TermCount> = BTreeMap::new();
    for tx in transactions {
        for (term, n) in tx.occurrence_pairs() {
            let e = terms.entry(term.clone()).or_insert(TermCount {
                document_frequency: 0,
                total_occurrences: 0,
            });
            e.document_frequency += 1;
            e.total_occurrences += n as usize;
        }
    }
    TermStats {
        n_transactions: transactions.len(),
        terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_timestamp, Tweet};

    fn day() -> NaiveDate {
        NaiveDate::from_ymd_opt(2012, 3, 1).unwrap()
    }

    #[test]
    fn normalize_fixture() {
        let text = "Apple's $AAPL up! http://t.co/x";
        assert_eq!(normalize_text(text, &TokenConfig::without_stopwords()), ["apple", "aapl", "up"]);
        assert_eq!(normalize_text(text, &TokenConfig::default()), ["apple", "aapl"]);
        assert!(normalize_text("", &TokenConfig::default()).is_empty());
        assert_eq!(normalize_text("#apple @cnn APPLE", &TokenConfig::default()), ["apple", "apple"]);
    }

    #[test]
    fn normalize_edges() {
        let cfg = TokenConfig::default();
        assert_eq!(normalize_text("(@reuters_biz) iPhone/iPad", &cfg), ["iphone", "ipad"]);
        assert_eq!(normalize_text("see www.apple.com now", &cfg), ["see"]);
        assert_eq!(normalize_text("a b cd", &cfg), ["cd"]);
        assert_eq!(normalize_text("it\u{2019}s Café", &cfg), ["café"]);
        // decomposed e + combining acute composes to the same token
        assert_eq!(normalize_text("Cafe\u{301}", &cfg), ["café"]);
        assert_eq!(normalize_text("\u{1D540}pad", &cfg), ["ipad"]);
    }

    #[test]
    fn stopword_file_format() {
        let words = parse_stopwords("# header\nThe\n\n  and  # trailing\n");
        assert_eq!(words.len(), 2);
        assert!(words.contains("the") && words.contains("and"));
        assert!(builtin_stopwords().contains("up"));
        assert!((100..=140).contains(&builtin_stopwords().len()));
    }

    #[test]
    fn transactions_from_corpus() {
        let mk = |id: &str, text: &str| Tweet {
            id: id.into(),
            author: "u".into(),
            timestamp: parse_timestamp("2012-03-01T10:00:00Z").unwrap(),
            text: text.into(),
        };
        let corpus = Corpus::from_tweets(vec![mk("1", "apple stock up"), mk("2", "apple apple"), mk("3", "!!")], "");
        let tx = to_transactions(&corpus, &TokenConfig::default());
        assert_eq!(tx.len(), 3);
        assert_eq!(tx[0].terms, BTreeSet::from(["apple".to_string(), "stock".to_string()]));
        assert_eq!(tx[1].terms.len(), 1);
        assert!(tx[2].terms.is_empty());
        assert_eq!(tx[0].date, day());

        let stats = term_stats(&tx);
        assert_eq!(stats.n_transactions, 3);
        assert_eq!(
            stats.get("apple"),
            Some(TermCount {
                document_frequency: 2,
                total_occurrences: 3
            })
        );
    }

    #[test]
    fn stats_counts_and_order() {
        let tx = vec![Transaction::new("1", ["a", "b"], day()), Transaction::new("2", ["a"], day())];
        let stats = term_stats(&tx);
        let ranked: Vec<_> = stats.ranked().into_iter().map(|r| (r.term, r.document_frequency)).collect();
        assert_eq!(ranked, [("a".to_string(), 2), ("b".to_string(), 1)]);
        assert!(term_stats(&[]).is_empty());

        let tx = vec![Transaction::new("1", ["z", "b"], day()), Transaction::new("2", ["c"], day())];
        let order: Vec<_> = term_stats(&tx).top(2).into_iter().map(|r| r.term).collect();
        assert_eq!(order, ["b", "c"]);
    }
}
