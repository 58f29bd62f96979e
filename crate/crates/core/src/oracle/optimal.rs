use crate::dataset::CategoricalDataset;
use crate::error::{DtfError, Result};
use crate::tsp::Tsp;

/// Upper bound on `∏_N ∏_j |D_j(N)|!` for [`brute_force_optimal_nll`].
pub const OPTIMAL_ASSIGNMENT_LIMIT: u128 = 100_000;

/// All orderings of `values`, as lists of images: `out[i][r]` is where the
/// r-th value goes.
fn arrangements(values: &[usize]) -> Vec<Vec<usize>> {
    if values.len() <= 1 {
        return vec![values.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in values.iter().enumerate() {
        let mut rest = values.to_vec();
        rest.remove(i);
        for mut tail in arrangements(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, x| acc.saturating_mul(x))
}

fn entropy_sum(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| -(c as f64) * (c as f64 / n as f64).ln())
        .sum()
}

/// Minimum mean train NLL (nats, unsmoothed) over every assignment of
/// domain-preserving local permutations to the nodes of an identity tree.
///
/// For an assignment, a point reaching leaf `L` along `root, …, L` is mapped
/// to `L_root ∘ … ∘ L_leaf (x)`, which is what any tree-equivalent relabeling
/// of the structure computes. Only leaf counts matter, so each assignment is
/// scored from per-leaf count rows.
pub fn brute_force_optimal_nll(structure: &Tsp, data: &CategoricalDataset) -> Result<f64> {
    if !structure.is_identity() {
        return Err(DtfError::InvalidArgument(
            "the optimality oracle expects a tree with identity permutations".into(),
        ));
    }
    if data.is_empty() {
        return Err(DtfError::EmptyDataset);
    }
    let cards = structure.cardinalities().to_vec();
    let d = cards.len();
    let nodes = structure.nodes();
    let size = nodes
        .iter()
        .flat_map(|n| n.domain.sets().iter().map(|s| factorial(s.len())))
        .fold(1u128, |acc, x| acc.saturating_mul(x));
    if size > OPTIMAL_ASSIGNMENT_LIMIT {
        return Err(DtfError::GuardExceeded {
            size,
            limit: OPTIMAL_ASSIGNMENT_LIMIT,
        });
    }
    // options[node][j]: candidate maps of feature j at that node
    let options: Vec<Vec<Vec<Vec<usize>>>> = nodes
        .iter()
        .map(|node| {
            (0..d)
                .map(|j| {
                    let dom = node.domain.feature(j);
                    arrangements(dom)
                        .into_iter()
                        .map(|images| {
                            let mut map: Vec<usize> = (0..cards[j]).collect();
                            for (&from, &to) in dom.iter().zip(&images) {
                                map[from] = to;
                            }
                            map
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    // raw leaf counts and root-to-leaf paths
    let leaves = structure.leaf_ids();
    let mut leaf_counts = vec![vec![vec![0u64; 0]; d]; nodes.len()];
    for &l in &leaves {
        leaf_counts[l] = cards.iter().map(|&k| vec![0u64; k]).collect();
    }
    for x in data.rows() {
        let path = structure.route_raw(x);
        let leaf = *path.last().expect("nonempty path");
        for (j, &a) in x.iter().enumerate() {
            leaf_counts[leaf][j][a] += 1;
        }
    }
    let paths: Vec<Vec<usize>> = leaves
        .iter()
        .map(|&l| {
            let parents = structure.parents();
            let mut path = vec![l];
            while let Some(p) = parents[*path.last().expect("nonempty")] {
                path.push(p);
            }
            path
        })
        .collect();

    let slots: Vec<(usize, usize)> = (0..nodes.len())
        .flat_map(|n| (0..d).map(move |j| (n, j)))
        .collect();
    let mut choice = vec![0usize; slots.len()];
    let mut best = f64::INFINITY;
    loop {
        let mut total = 0.0;
        for j in 0..d {
            let mut merged = vec![0u64; cards[j]];
            for (&leaf, path) in leaves.iter().zip(&paths) {
                // path runs leaf to root, so the leaf's map is applied first
                for (a, &c) in leaf_counts[leaf][j].iter().enumerate() {
                    let mut v = a;
                    for &node in path {
                        v = options[node][j][choice[node * d + j]][v];
                    }
                    merged[v] += c;
                }
            }
            total += entropy_sum(&merged);
        }
        best = best.min(total / data.n_rows() as f64);
        // odometer over all slots
        let mut s = 0;
        loop {
            if s == slots.len() {
                return Ok(best);
            }
            let (n, j) = slots[s];
            choice[s] += 1;
            if choice[s] < options[n][j].len() {
                break;
            }
            choice[s] = 0;
            s += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrangements_count() {
        assert_eq!(arrangements(&[0, 1, 2]).len(), 6);
        assert_eq!(arrangements(&[4]).len(), 1);
        assert_eq!(factorial(5), 120);
    }

    #[test]
    fn single_leaf_is_label_invariant() {
        let data = CategoricalDataset::new(vec![vec![0, 1], vec![1, 1], vec![2, 0]], vec![3, 2]).unwrap();
        let t = Tsp::identity(&[3, 2]);
        let got = brute_force_optimal_nll(&t, &data).unwrap();
        assert!((got - data.marginal_entropy()).abs() < 1e-12);
    }
}
