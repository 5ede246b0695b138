//! Frequent itemsets, association rules and their graph exports.
//!
//! Support of an itemset is the fraction of transactions whose term set
//! contains it; an itemset is frequent when its support is strictly greater
//! than the threshold. Mining is level-wise Apriori over a vertical bitset
//! layout: each term owns the set of transactions containing it and the
//! support of a candidate is the popcount of the intersection.

mod bitset;
pub mod graph;
pub mod rules;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer::Transaction;
use bitset::TidSet;

pub use graph::{itemset_graph, rule_graph, Graph, GraphEdge, GraphNode, NodeKind};
pub use rules::{generate_rules, term_associations, AssociationRule};

pub const DEFAULT_MAX_LEN: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum MinerError {
    #[error("no transactions")]
    EmptyTransactions,
    #[error("itemset has no terms")]
    EmptyItemset,
    #[error("minimum support {0} outside [0, 1)")]
    InvalidMinSupport(f64),
    #[error("minimum confidence {0} outside [0, 1]")]
    InvalidMinConfidence(f64),
    #[error("max_len must be at least 1")]
    InvalidMaxLen,
    #[error("term {0:?} does not occur in any transaction")]
    UnknownTerm(String),
}

impl MinerError {
    pub fn code(&self) -> &'static str {
        match self {
            MinerError::EmptyTransactions => "empty_transactions",
            MinerError::EmptyItemset => "empty_itemset",
            MinerError::InvalidMinSupport(_) => "invalid_min_support",
            MinerError::InvalidMinConfidence(_) => "invalid_min_confidence",
            MinerError::InvalidMaxLen => "invalid_max_len",
            MinerError::UnknownTerm(_) => "unknown_term",
        }
    }
}

/// Non-empty, sorted, duplicate-free set of terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Itemset(Vec<String>);

impl Itemset {
    pub fn new<I, T>(terms: I) -> Result<Self, MinerError>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let mut terms: Vec<String> = terms.into_iter().map(Into::into).collect();
        terms.sort();
        terms.dedup();
        if terms.is_empty() {
            return Err(MinerError::EmptyItemset);
        }
        Ok(Itemset(terms))
    }

    pub fn terms(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, term: &str) -> bool {
        self.0.binary_search_by(|t| t.as_str().cmp(term)).is_ok()
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        self.0.iter().all(|t| other.contains(t))
    }
}

impl TryFrom<Vec<String>> for Itemset {
    type Error = MinerError;

    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        Itemset::new(v)
    }
}

impl From<Itemset> for Vec<String> {
    fn from(i: Itemset) -> Self {
        i.0
    }
}

/// Comma-separated terms, lowercased: `"apple,stock"`.
impl FromStr for Itemset {
    type Err = MinerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Itemset::new(s.split(',').map(|t| t.trim().to_lowercase()).filter(|t| !t.is_empty()))
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequentItemset {
    pub itemset: Itemset,
    pub support: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningResult {
    pub frequent: Vec<FrequentItemset>,
    pub total_transactions: usize,
    pub min_support: f64,
}

impl MiningResult {
    pub fn get(&self, itemset: &Itemset) -> Option<&FrequentItemset> {
        self.frequent.iter().find(|f| &f.itemset == itemset)
    }

    pub fn count_index(&self) -> BTreeMap<&Itemset, usize> {
        self.frequent.iter().map(|f| (&f.itemset, f.count)).collect()
    }
}

/// The single place a count is turned into a support fraction.
pub fn support_fraction(count: usize, total: usize) -> f64 {
    count as f64 / total as f64
}

pub fn is_frequent(count: usize, total: usize, min_support: f64) -> bool {
    support_fraction(count, total) > min_support
}

/// Fraction and number of transactions containing every term of `itemset`.
pub fn support(itemset: &Itemset, transactions: &[Transaction]) -> Result<(f64, usize), MinerError> {
    if transactions.is_empty() {
        return Err(MinerError::EmptyTransactions);
    }
    let count = transactions.iter().filter(|t| t.contains_all(itemset.terms())).count();
    Ok((support_fraction(count, transactions.len()), count))
}

/// Result ordering: descending support, then ascending size, then terms.
pub(crate) fn frequent_order(a: &FrequentItemset, b: &FrequentItemset) -> Ordering {
    b.count
        .cmp(&a.count)
        .then_with(|| a.itemset.len().cmp(&b.itemset.len()))
        .then_with(|| a.itemset.cmp(&b.itemset))
}

/// Smallest count whose support strictly exceeds `min_support`.
fn min_count(total: usize, min_support: f64) -> usize {
    let mut c = ((min_support * total as f64).floor() as usize).saturating_sub(1).max(1);
    while c <= total && !is_frequent(c, total, min_support) {
        c += 1;
    }
    c
}

struct Level {
    items: Vec<u32>,
    tids: TidSet,
}

/// All itemsets of at most `max_len` terms with support strictly above
/// `min_support`.
pub fn mine_frequent(transactions: &[Transaction], min_support: f64, max_len: usize) -> Result<MiningResult, MinerError> {
    if transactions.is_empty() {
        return Err(MinerError::EmptyTransactions);
    }
    if !(0.0..1.0).contains(&min_support) {
        return Err(MinerError::InvalidMinSupport(min_support));
    }
    if max_len == 0 {
        return Err(MinerError::InvalidMaxLen);
    }
    let total = transactions.len();
    let threshold = min_count(total, min_support);

    // Term dictionary: only terms that can be frequent on their own.
    let mut term_tids: BTreeMap<&str, TidSet> = BTreeMap::new();
    for (i, tx) in transactions.iter().enumerate() {
        for term in &tx.terms {
            term_tids.entry(term).or_insert_with(|| TidSet::empty(total)).insert(i);
        }
    }
    let (dictionary, mut level): (Vec<&str>, Vec<Level>) = term_tids
        .into_iter()
        .filter(|(_, tids)| tids.count() >= threshold)
        .enumerate()
        .map(|(idx, (term, tids))| {
            (
                term,
                Level {
                    items: vec![idx as u32],
                    tids,
                },
            )
        })
        .unzip();

    let mut frequent = Vec::new();
    let emit = |level: &[Level], out: &mut Vec<FrequentItemset>| {
        out.extend(level.iter().map(|l| {
            let count = l.tids.count();
            FrequentItemset {
                itemset: Itemset(l.items.iter().map(|&i| dictionary[i as usize].to_string()).collect()),
                support: support_fraction(count, total),
                count,
            }
        }));
    };
    emit(&level, &mut frequent);

    for _ in 1..max_len {
        if level.len() < 2 {
            break;
        }
        level = next_level(&level, threshold);
        emit(&level, &mut frequent);
    }

    frequent.sort_by(frequent_order);
    Ok(MiningResult {
        frequent,
        total_transactions: total,
        min_support,
    })
}

/// Joins itemsets sharing all but their last item, prunes candidates with an
/// infrequent subset, and keeps those meeting the count threshold. `level`
/// must be sorted by `items`; the output is too.
fn next_level(level: &[Level], threshold: usize) -> Vec<Level> {
    let known: HashSet<&[u32]> = level.iter().map(|l| l.items.as_slice()).collect();
    let k = level[0].items.len();

    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=level.len() {
        if i == level.len() || level[i].items[..k - 1] != level[start].items[..k - 1] {
            groups.push(start..i);
            start = i;
        }
    }

    groups
        .into_par_iter()
        .flat_map_iter(|range| {
            let group = &level[range];
            let known = &known;
            (0..group.len()).flat_map(move |a| {
                (a + 1..group.len()).filter_map(move |b| {
                    let (x, y) = (&group[a], &group[b]);
                    let mut items = x.items.clone();
                    items.push(y.items[k - 1]);
                    let all_subsets_known = (0..k - 1).all(|drop| {
                        let mut sub = items.clone();
                        sub.remove(drop);
                        known.contains(sub.as_slice())
                    });
                    if !all_subsets_known || x.tids.intersect_count(&y.tids) < threshold {
                        return None;
                    }
                    Some(Level {
                        items,
                        tids: x.tids.intersect(&y.tids),
                    })
                })
            })
        })
        .collect()
}
