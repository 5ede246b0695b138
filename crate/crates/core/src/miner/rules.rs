use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{support_fraction, Itemset, MinerError, MiningResult};
use crate::tokenizer::Transaction;

/// Implication `antecedent -> consequent` over a frequent itemset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationRule {
    pub antecedent: Itemset,
    pub consequent: Itemset,
    /// Support of antecedent ∪ consequent.
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

/// Every split of every frequent itemset of two or more terms into non-empty
/// antecedent and consequent whose confidence reaches `min_confidence`.
///
/// Sorted by descending confidence, then support, then antecedent and
/// consequent terms.
pub fn generate_rules(result: &MiningResult, min_confidence: f64) -> Result<Vec<AssociationRule>, MinerError> {
    if !(0.0..=1.0).contains(&min_confidence) {
        return Err(MinerError::InvalidMinConfidence(min_confidence));
    }
    let counts = result.count_index();
    let total = result.total_transactions;
    let support_of = |s: &Itemset| counts.get(s).map(|&c| support_fraction(c, total));

    let mut rules = Vec::new();
    for f in result.frequent.iter().filter(|f| f.itemset.len() >= 2) {
        let terms = f.itemset.terms();
        let k = terms.len();
        for mask in 1..(1u64 << k) - 1 {
            let (x, y): (Vec<_>, Vec<_>) = terms
                .iter()
                .enumerate()
                .partition(|(i, _)| mask & (1 << i) != 0);
            let antecedent = Itemset(x.into_iter().map(|(_, t)| t.clone()).collect());
            let consequent = Itemset(y.into_iter().map(|(_, t)| t.clone()).collect());
            // Subsets of a frequent itemset are frequent, so both lookups hit
            // unless the result was assembled by hand.
            let (Some(sx), Some(sy)) = (support_of(&antecedent), support_of(&consequent)) else {
                continue;
            };
            let confidence = f.support / sx;
            if confidence >= min_confidence {
                rules.push(AssociationRule {
                    antecedent,
                    consequent,
                    support: f.support,
                    confidence,
                    lift: confidence / sy,
                });
            }
        }
    }
    rules.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then_with(|| b.support.total_cmp(&a.support))
            .then_with(|| a.antecedent.cmp(&b.antecedent))
            .then_with(|| a.consequent.cmp(&b.consequent))
    });
    Ok(rules)
}

/// Terms whose occurrence pattern correlates with `term` across transactions.
///
/// The correlation is Pearson's r between the two 0/1 occurrence vectors,
/// computed from the contingency counts. Candidates with zero variance are
/// skipped. Sorted descending by correlation, ties by term.
pub fn term_associations(
    transactions: &[Transaction],
    term: &str,
    min_corr: f64,
) -> Result<Vec<(String, f64)>, MinerError> {
    let n = transactions.len();
    let mut own = 0usize;
    let mut occurs: BTreeMap<&str, usize> = BTreeMap::new();
    let mut together: BTreeMap<&str, usize> = BTreeMap::new();
    for tx in transactions {
        let has = tx.terms.contains(term);
        own += has as usize;
        for t in tx.terms.iter().filter(|t| t.as_str() != term) {
            *occurs.entry(t).or_default() += 1;
            if has {
                *together.entry(t).or_default() += 1;
            }
        }
    }
    if own == 0 {
        return Err(MinerError::UnknownTerm(term.to_string()));
    }
    if own == n {
        return Ok(Vec::new());
    }
    let (nf, a) = (n as f64, own as f64);
    let mut out: Vec<(String, f64)> = occurs
        .into_iter()
        .filter(|&(_, b)| b < n)
        .map(|(t, b)| {
            let b = b as f64;
            let c = together.get(t).copied().unwrap_or(0) as f64;
            let r = (nf * c - a * b) / (a * (nf - a) * b * (nf - b)).sqrt();
            (t.to_string(), r.clamp(-1.0, 1.0))
        })
        .filter(|&(_, r)| r >= min_corr)
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}
