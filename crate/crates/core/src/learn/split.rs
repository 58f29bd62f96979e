use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Criterion;
use crate::counts::{row_nll, CountMatrix};
use crate::dataset::CategoricalDataset;
use crate::domain::NodeDomain;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub left_values: Vec<usize>,
    /// Higher is better. Negative minimum permuted NLL under GLP; zero for random splits.
    pub score: f64,
}

/// NLL in nats after the best independent relabeling of the right child's
/// counts onto the left child's, feature by feature.
///
/// For every feature other than the split feature both rows are sorted
/// ascending and added rank to rank. The split feature keeps the plain sum,
/// since its left and right values never overlap. Values outside the node
/// domain are zero on both sides, so they pair up with each other and drop out.
pub fn min_perm_nll(left: &CountMatrix, right: &CountMatrix, split_feature: usize) -> f64 {
    let mut total = 0.0;
    for j in 0..left.n_features() {
        if j == split_feature {
            let merged: Vec<u64> = left.row(j).iter().zip(right.row(j)).map(|(a, b)| a + b).collect();
            total += row_nll(&merged);
        } else {
            let mut l = left.row(j).to_vec();
            let mut r = right.row(j).to_vec();
            l.sort_unstable();
            r.sort_unstable();
            let merged: Vec<u64> = l.iter().zip(&r).map(|(a, b)| a + b).collect();
            total += row_nll(&merged);
        }
    }
    total
}

/// Picks a split for the rows `rows` of `data` reaching a node with `domain`.
/// Returns `None` when no feature has two or more values left.
///
/// GLP scans every `(s, {a})` with `a ∈ D_s` and keeps the first maximum, so
/// ties go to the lowest feature and then the lowest value.
pub fn find_best_split(
    data: &CategoricalDataset,
    rows: &[usize],
    domain: &NodeDomain,
    criterion: Criterion,
    rng: &mut ChaCha8Rng,
) -> Option<SplitCandidate> {
    let splittable = domain.splittable_features();
    if splittable.is_empty() {
        return None;
    }
    match criterion {
        Criterion::Random => {
            let feature = splittable[rng.random_range(0..splittable.len())];
            let values = domain.feature(feature);
            let value = values[rng.random_range(0..values.len())];
            Some(SplitCandidate {
                feature,
                left_values: vec![value],
                score: 0.0,
            })
        }
        Criterion::Glp => {
            let cards = data.cardinalities();
            let total = data.counts_of(rows);
            // conditional[s][a]: counts of rows with x_s = a
            let mut conditional: Vec<Vec<CountMatrix>> = splittable
                .iter()
                .map(|&s| vec![CountMatrix::zeros(cards); cards[s]])
                .collect();
            for &i in rows {
                let x = data.row(i);
                for (slot, &s) in splittable.iter().enumerate() {
                    conditional[slot][x[s]].add_config(x);
                }
            }
            let mut best: Option<SplitCandidate> = None;
            for (slot, &s) in splittable.iter().enumerate() {
                for &a in domain.feature(s) {
                    let left = &conditional[slot][a];
                    let right = subtract(&total, left);
                    let score = -min_perm_nll(left, &right, s);
                    if best.as_ref().is_none_or(|b| score > b.score) {
                        best = Some(SplitCandidate {
                            feature: s,
                            left_values: vec![a],
                            score,
                        });
                    }
                }
            }
            best
        }
    }
}

fn subtract(total: &CountMatrix, part: &CountMatrix) -> CountMatrix {
    CountMatrix::from_rows(
        total
            .rows()
            .iter()
            .zip(part.rows())
            .map(|(t, p)| t.iter().zip(p).map(|(a, b)| a - b).collect())
            .collect(),
    )
}
