use crate::counts::CountMatrix;
use crate::dataset::CategoricalDataset;
use crate::error::Result;
use crate::perm::IndependentPermutation;
use crate::tsp::Tsp;

use super::two_pass::sort_1d;

/// Whether `witness[c_N]` is ascending on `D_j(N)` and zero outside it, for
/// every node `N` and feature `j`.
pub fn rank_consistent_under(
    tree: &Tsp,
    node_counts: &[CountMatrix],
    witness: &IndependentPermutation,
) -> Result<bool> {
    for (node, counts) in tree.nodes().iter().zip(node_counts) {
        let moved = witness.permute_counts(counts)?;
        for j in 0..tree.n_features() {
            let domain = node.domain.feature(j);
            let row = moved.row(j);
            let inside: Vec<u64> = domain.iter().map(|&a| row[a]).collect();
            if inside.windows(2).any(|w| w[0] > w[1]) {
                return Ok(false);
            }
            let outside_total: u64 = row.iter().sum::<u64>() - inside.iter().sum::<u64>();
            if outside_total != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Searches for a single independent permutation that puts every node's
/// counts in ascending order on its domain. Two witnesses are tried: the
/// identity, and the permutation that sorts the root's counts. A `true`
/// answer is always backed by a witness.
pub fn check_rank_consistency(tree: &Tsp, data: &CategoricalDataset) -> Result<bool> {
    let counts = tree.node_counts(data)?;
    let cards = tree.cardinalities();
    let identity = IndependentPermutation::identity(cards);
    if rank_consistent_under(tree, &counts, &identity)? {
        return Ok(true);
    }
    let root = &counts[0];
    let maps = (0..cards.len())
        .map(|j| sort_1d(root.row(j), &(0..cards[j]).collect::<Vec<_>>()))
        .collect();
    let by_root = IndependentPermutation::from_maps(maps)?;
    rank_consistent_under(tree, &counts, &by_root)
}
