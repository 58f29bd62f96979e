#![allow(dead_code)]

use dtf_core::{CategoricalDataset, Criterion, FitConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random data with some dependence: each feature copies a random earlier
/// feature (mod its cardinality) with probability one half.
pub fn random_data(rng: &mut ChaCha8Rng, n: usize, cards: &[usize]) -> CategoricalDataset {
    let rows = (0..n)
        .map(|_| {
            let mut x: Vec<usize> = Vec::with_capacity(cards.len());
            for (j, &k) in cards.iter().enumerate() {
                let v = if j > 0 && rng.random_bool(0.5) {
                    x[rng.random_range(0..j)] % k
                } else {
                    rng.random_range(0..k)
                };
                x.push(v);
            }
            x
        })
        .collect();
    CategoricalDataset::new(rows, cards.to_vec()).unwrap()
}

pub fn random_cards(rng: &mut ChaCha8Rng, max_d: usize, max_k: usize) -> Vec<usize> {
    let d = rng.random_range(1..=max_d);
    (0..d).map(|_| rng.random_range(1..=max_k)).collect()
}

pub fn random_config(rng: &mut ChaCha8Rng, max_depth: usize, max_tsps: usize) -> FitConfig {
    FitConfig {
        max_depth: rng.random_range(0..=max_depth),
        min_samples_split: rng.random_range(2..6),
        criterion: if rng.random_bool(0.5) { Criterion::Glp } else { Criterion::Random },
        seed: rng.random(),
        num_tsps: rng.random_range(1..=max_tsps),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Summed empirical entropy of each column, per row, computed directly.
pub fn marginal_entropy(data: &CategoricalDataset) -> f64 {
    let n = data.n_rows() as f64;
    let mut total = 0.0;
    for (j, &k) in data.cardinalities().iter().enumerate() {
        let mut counts = vec![0usize; k];
        for row in data.rows() {
            counts[row[j]] += 1;
        }
        for c in counts.into_iter().filter(|&c| c > 0) {
            let p = c as f64 / n;
            total -= p * p.ln();
        }
    }
    total
}
