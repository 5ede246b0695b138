#![allow(dead_code)]

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tweetminer::Transaction;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn day(i: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2012, 1, 1).unwrap() + chrono::Days::new(i as u64)
}

/// Random baskets over terms `t00..t{n_terms}`; each term is included with
/// its own probability so supports spread out.
pub fn random_transactions(rng: &mut ChaCha8Rng, n_terms: usize, n_tx: usize) -> Vec<Transaction> {
    let probs: Vec<f64> = (0..n_terms).map(|_| rng.random_range(0.05..0.7)).collect();
    (0..n_tx)
        .map(|i| {
            let terms: Vec<String> = probs
                .iter()
                .enumerate()
                .filter(|&(_, &p)| rng.random_bool(p))
                .map(|(t, _)| format!("t{t:02}"))
                .collect();
            Transaction::new(i.to_string(), terms, day((i % 30) as u32))
        })
        .collect()
}
