use crate::error::{DtfError, Result};
use crate::perm::IndependentPermutation;
use crate::tsp::{Split, Tsp};

/// Permutation of `0..counts.len()` that sorts the counts ascending within
/// `domain` and leaves everything outside it fixed. Equal counts keep their
/// original order, so already-sorted input yields the identity.
///
/// The r-th smallest category is sent to the r-th smallest domain value.
pub fn sort_1d(counts: &[u64], domain: &[usize]) -> Vec<usize> {
    let mut map: Vec<usize> = (0..counts.len()).collect();
    let mut order = domain.to_vec();
    order.sort_by_key(|&a| counts[a]);
    for (rank, &a) in order.iter().enumerate() {
        map[a] = domain[rank];
    }
    map
}

/// Bottom-up pass: each node's initial local counts are the sum of its
/// children's sorted local counts (leaves keep theirs from the split search),
/// and its local permutation sorts them feature by feature on the node domain.
pub fn learn_local_permutations(tree: Tsp) -> Result<Tsp> {
    let cards = tree.cardinalities().to_vec();
    let max_depth = tree.max_depth();
    let mut nodes = tree.into_nodes();
    for id in (0..nodes.len()).rev() {
        let init = match nodes[id].children() {
            Some((l, r)) => {
                let lc = nodes[l].local_counts.as_ref();
                let rc = nodes[r].local_counts.as_ref();
                match (lc, rc) {
                    (Some(a), Some(b)) => a.checked_add(b)?,
                    _ => unreachable!("children are visited first"),
                }
            }
            None => nodes[id].local_counts_init.clone().ok_or_else(|| {
                DtfError::InvalidTree(format!("leaf {id} has no initial local counts"))
            })?,
        };
        let maps = (0..cards.len())
            .map(|j| sort_1d(init.row(j), nodes[id].domain.feature(j)))
            .collect();
        let local = IndependentPermutation::from_maps(maps)?;
        let sorted = local.permute_counts(&init)?;
        let node = &mut nodes[id];
        node.local_counts_init = Some(init);
        node.local_counts = Some(sorted);
        node.local_perm = Some(local);
    }
    Tsp::from_nodes(nodes, cards, max_depth)
}

/// Top-down pass: conjugates every local permutation by the composition of
/// its ancestors' local permutations and moves split values along, giving a
/// tree that routes every input to the same node ids and satisfies the
/// invertibility constraint.
///
/// With `A` the ancestors' product (`A = id` at the root) and `L` the local
/// permutation, the node permutation is `A ∘ L ∘ A⁻¹`, the split set becomes
/// `(A ∘ L)(v)`, and children inherit `A ∘ L`.
pub fn construct_equivalent_tree(structure: &Tsp) -> Result<Tsp> {
    if !structure.is_identity() {
        return Err(DtfError::InvalidArgument(
            "the equivalent-tree pass expects identity node permutations".into(),
        ));
    }
    let cards = structure.cardinalities().to_vec();
    let mut nodes = structure.nodes().to_vec();
    let mut ancestors: Vec<Option<IndependentPermutation>> = vec![None; nodes.len()];
    ancestors[0] = Some(IndependentPermutation::identity(&cards));
    for id in 0..nodes.len() {
        let anc = ancestors[id].take().expect("parents precede children");
        let local = nodes[id].local_perm.clone().ok_or_else(|| {
            DtfError::InvalidTree(format!("node {id} has no local permutation"))
        })?;
        let through = anc.then_after(&local);
        nodes[id].perm = through.then_after(&anc.inverse());
        if let Some((l, r)) = nodes[id].children() {
            let split = nodes[id].split.as_ref().expect("internal node");
            let s = split.feature();
            let moved = through.image_of(s, split.left_values());
            nodes[id].split = Some(Split::new(s, moved, cards[s])?);
            ancestors[l] = Some(through.clone());
            ancestors[r] = Some(through);
        }
    }
    let tree = Tsp::from_nodes(nodes, cards.clone(), structure.max_depth())?;
    let domains = tree.computed_domains();
    let mut nodes = tree.into_nodes();
    for (node, dom) in nodes.iter_mut().zip(domains) {
        node.domain = dom;
    }
    Tsp::from_nodes(nodes, cards, structure.max_depth())
}
