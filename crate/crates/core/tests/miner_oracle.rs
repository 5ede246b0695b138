mod common;

use std::collections::BTreeSet;

use common::{random_transactions, rng};
use proptest::prelude::*;
use rand::Rng;
use tweetminer::miner::{generate_rules, itemset_graph, mine_frequent, support, term_associations, Itemset};
use tweetminer::{term_stats, Transaction};

/// Every non-empty subset of the observed terms with at most `max_len`
/// elements, counted by scanning all transactions.
fn exhaustive(transactions: &[Transaction], min_support: f64, max_len: usize) -> Vec<(Vec<String>, usize)> {
    let terms: Vec<String> = transactions
        .iter()
        .flat_map(|t| t.terms.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = transactions.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << terms.len()) {
        if mask.count_ones() as usize > max_len {
            continue;
        }
        let subset: Vec<String> = (0..terms.len()).filter(|i| mask & (1 << i) != 0).map(|i| terms[i].clone()).collect();
        let count = transactions.iter().filter(|t| subset.iter().all(|s| t.terms.contains(s))).count();
        if count as f64 / n as f64 > min_support {
            out.push((subset, count));
        }
    }
    out.sort();
    out
}

#[test]
fn apriori_matches_enumeration() {
    let mut r = rng(7);
    for _ in 0..200 {
        let n_terms = r.random_range(1..=12);
        let n_tx = r.random_range(1..=200);
        let tx = random_transactions(&mut r, n_terms, n_tx);
        let min_support = r.random_range(0.0..0.6);
        let max_len = r.random_range(1..=12);
        let mined = mine_frequent(&tx, min_support, max_len).unwrap();
        let mut got: Vec<(Vec<String>, usize)> = mined
            .frequent
            .iter()
            .map(|f| (f.itemset.terms().to_vec(), f.count))
            .collect();
        got.sort();
        assert_eq!(got, exhaustive(&tx, min_support, max_len));
    }
}

#[test]
fn output_order_and_determinism() {
    let mut r = rng(11);
    let tx = random_transactions(&mut r, 10, 150);
    let a = mine_frequent(&tx, 0.05, 4).unwrap();
    let b = mine_frequent(&tx, 0.05, 4).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    for w in a.frequent.windows(2) {
        let key = |f: &tweetminer::miner::FrequentItemset| (std::cmp::Reverse(f.count), f.itemset.len(), f.itemset.clone());
        assert!(key(&w[0]) < key(&w[1]));
    }
    for f in &a.frequent {
        assert_eq!(f.support, f.count as f64 / tx.len() as f64);
        assert!(f.support > a.min_support);
    }
}

#[test]
fn downward_closure() {
    let mut r = rng(3);
    for _ in 0..20 {
        let tx = random_transactions(&mut r, 9, 120);
        let mined = mine_frequent(&tx, r.random_range(0.0..0.4), 5).unwrap();
        let present: BTreeSet<&Itemset> = mined.frequent.iter().map(|f| &f.itemset).collect();
        for f in &mined.frequent {
            let terms = f.itemset.terms();
            for mask in 1u32..(1 << terms.len()) - 1 {
                let sub = Itemset::new((0..terms.len()).filter(|i| mask & (1 << i) != 0).map(|i| terms[i].clone())).unwrap();
                assert!(present.contains(&sub), "{sub} missing under {}", f.itemset);
            }
        }
    }
}

#[test]
fn anti_monotone_support() {
    let mut r = rng(99);
    let tx = random_transactions(&mut r, 12, 200);
    let terms: Vec<String> = (0..12).map(|t| format!("t{t:02}")).collect();
    for _ in 0..10_000 {
        let big: Vec<String> = terms.iter().filter(|_| r.random_bool(0.4)).cloned().collect();
        if big.is_empty() {
            continue;
        }
        let small: Vec<String> = big.iter().filter(|_| r.random_bool(0.5)).cloned().collect();
        let small = if small.is_empty() { vec![big[0].clone()] } else { small };
        let (s_big, _) = support(&Itemset::new(big).unwrap(), &tx).unwrap();
        let (s_small, _) = support(&Itemset::new(small).unwrap(), &tx).unwrap();
        assert!(s_small >= s_big);
    }
}

#[test]
fn rule_invariants() {
    let mut r = rng(5);
    let tx = random_transactions(&mut r, 8, 100);
    let mined = mine_frequent(&tx, 0.05, 4).unwrap();
    let rules = generate_rules(&mined, 0.0).unwrap();
    let expected: usize = mined.frequent.iter().map(|f| (1usize << f.itemset.len()) - 2).sum();
    assert_eq!(rules.len(), expected);
    for rule in &rules {
        let union = Itemset::new(rule.antecedent.terms().iter().chain(rule.consequent.terms()).cloned()).unwrap();
        assert_eq!(union.len(), rule.antecedent.len() + rule.consequent.len());
        let sx = support(&rule.antecedent, &tx).unwrap().0;
        let sy = support(&rule.consequent, &tx).unwrap().0;
        let sxy = support(&union, &tx).unwrap().0;
        assert_eq!(rule.support, sxy);
        assert!(sxy <= sx);
        assert!(rule.confidence >= rule.support && rule.confidence <= 1.0 && rule.confidence > 0.0);
        assert!((rule.confidence - sxy / sx).abs() < 1e-12);
        assert!((rule.lift - sxy / sx / sy).abs() < 1e-12);
    }
    let strict = generate_rules(&mined, 0.8).unwrap();
    assert!(strict.iter().all(|r| r.confidence >= 0.8));
    assert!(strict.len() <= rules.len());
}

#[test]
fn singleton_support_matches_document_frequency() {
    let mut r = rng(21);
    let tx = random_transactions(&mut r, 12, 100);
    let stats = term_stats(&tx);
    for (term, c) in &stats.terms {
        let (s, count) = support(&Itemset::new([term.clone()]).unwrap(), &tx).unwrap();
        assert_eq!(count, c.document_frequency);
        assert_eq!(s, c.document_frequency as f64 / 100.0);
    }
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn associations_match_dense_pearson() {
    let mut r = rng(42);
    let tx = random_transactions(&mut r, 10, 200);
    let column = |term: &str| -> Vec<f64> { tx.iter().map(|t| t.terms.contains(term) as u8 as f64).collect() };
    let target = "t03";
    let got = term_associations(&tx, target, -1.0).unwrap();
    let x = column(target);
    let mut checked = 0;
    for (term, corr) in &got {
        let expected = pearson(&x, &column(term));
        assert!((corr - expected).abs() < 1e-12, "{term}: {corr} vs {expected}");
        checked += 1;
    }
    assert!(checked >= 8);
    for w in got.windows(2) {
        assert!(w[0].1 >= w[1].1);
    }
    let filtered = term_associations(&tx, target, 0.1).unwrap();
    assert!(filtered.iter().all(|(_, c)| *c >= 0.1));
}

#[test]
fn hasse_edges_are_one_term_extensions() {
    let mut r = rng(8);
    let tx = random_transactions(&mut r, 7, 80);
    let mined = mine_frequent(&tx, 0.1, 4).unwrap();
    let g = itemset_graph(&mined);
    let expected: usize = mined
        .frequent
        .iter()
        .filter(|f| f.itemset.len() >= 2)
        .map(|f| f.itemset.len())
        .sum();
    assert_eq!(g.edges.len(), expected);
    for e in &g.edges {
        let from: Itemset = e.from.parse().unwrap();
        let to: Itemset = e.to.parse().unwrap();
        assert!(from.is_subset_of(&to) && to.len() == from.len() + 1);
    }
}

proptest! {
    #[test]
    fn mining_small_baskets(baskets in prop::collection::vec(prop::collection::btree_set("[a-e]", 0..4), 1..40), min in 0.0f64..0.9) {
        let d = common::day(0);
        let tx: Vec<Transaction> = baskets.iter().enumerate().map(|(i, b)| Transaction::new(i.to_string(), b.iter().cloned(), d)).collect();
        let mined = mine_frequent(&tx, min, 5).unwrap();
        let mut got: Vec<(Vec<String>, usize)> = mined.frequent.iter().map(|f| (f.itemset.terms().to_vec(), f.count)).collect();
        got.sort();
        prop_assert_eq!(got, exhaustive(&tx, min, 5));
    }
}
