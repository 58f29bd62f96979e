use crate::domain::NodeDomain;
use crate::error::{DtfError, Result};
use crate::perm::IndependentPermutation;
use crate::space::{ConfigSpace, EXHAUSTIVE_LIMIT};
use crate::tsp::{Split, Tsp, TspNode};

/// A tree that swaps two configurations differing in exactly one feature and
/// fixes every other configuration.
///
/// A left spine splits off `{a_j}` for every other feature with more than
/// one category. Below it, the differing feature either already has just the
/// two values (the spine's last left node carries the swap) or is split once
/// more with the pair sent right, and that right leaf carries the swap.
pub fn single_feature_swap_tsp(a: &[usize], b: &[usize], cardinalities: &[usize]) -> Result<Tsp> {
    let d = cardinalities.len();
    for x in [a, b] {
        crate::dataset::CategoricalDataset::check_config(cardinalities, x)?;
    }
    let differing: Vec<usize> = (0..d).filter(|&j| a[j] != b[j]).collect();
    let f = match differing.as_slice() {
        [f] => *f,
        [] => return Err(DtfError::InvalidArgument("configurations are equal".into())),
        _ => {
            return Err(DtfError::InvalidArgument(format!(
                "configurations differ in {} features, expected one",
                differing.len()
            )))
        }
    };
    let cards = cardinalities.to_vec();
    let mut swap_maps: Vec<Vec<usize>> = cards.iter().map(|&k| (0..k).collect()).collect();
    swap_maps[f][a[f]] = b[f];
    swap_maps[f][b[f]] = a[f];
    let swap = IndependentPermutation::from_maps(swap_maps)?;

    let placeholder = NodeDomain::full(&cards);
    let mut nodes = vec![TspNode::leaf(0, 0, placeholder.clone(), &cards)];
    let mut current = 0;
    let attach = |nodes: &mut Vec<TspNode>, parent: usize, split: Split| -> usize {
        let depth = nodes[parent].depth + 1;
        let l = nodes.len();
        nodes.push(TspNode::leaf(l, depth, placeholder.clone(), &cards));
        nodes.push(TspNode::leaf(l + 1, depth, placeholder.clone(), &cards));
        nodes[parent].split = Some(split);
        nodes[parent].left = Some(l);
        nodes[parent].right = Some(l + 1);
        l
    };
    for j in (0..d).filter(|&j| j != f && cards[j] >= 2) {
        current = attach(&mut nodes, current, Split::new(j, vec![a[j]], cards[j])?);
    }
    if cards[f] > 2 {
        let rest: Vec<usize> = (0..cards[f]).filter(|&v| v != a[f] && v != b[f]).collect();
        let left = attach(&mut nodes, current, Split::new(f, rest, cards[f])?);
        current = left + 1;
    }
    nodes[current].perm = swap;
    let max_depth = nodes.iter().map(|n| n.depth).max().unwrap_or(0);
    let tree = Tsp::from_nodes(nodes, cards.clone(), max_depth)?;
    let domains = tree.computed_domains();
    let mut nodes = tree.into_nodes();
    for (node, dom) in nodes.iter_mut().zip(domains) {
        node.domain = dom;
    }
    Tsp::from_nodes(nodes, cards, max_depth)
}

/// Every configuration exactly once, consecutive entries differing in one
/// feature: fix the leading feature, walk the remaining space, and reverse
/// the walk on every other value of the leading feature.
pub fn snake_path(cardinalities: &[usize]) -> Result<Vec<Vec<usize>>> {
    ConfigSpace::new(cardinalities).check_guard(EXHAUSTIVE_LIMIT)?;
    fn walk(cards: &[usize]) -> Vec<Vec<usize>> {
        match cards.split_first() {
            None => vec![vec![]],
            Some((&k, rest)) => {
                let inner = walk(rest);
                let mut out = Vec::with_capacity(k * inner.len());
                for v in 0..k {
                    let block: Box<dyn Iterator<Item = &Vec<usize>>> = if v % 2 == 0 {
                        Box::new(inner.iter())
                    } else {
                        Box::new(inner.iter().rev())
                    };
                    for tail in block {
                        let mut x = Vec::with_capacity(cards.len());
                        x.push(v);
                        x.extend_from_slice(tail);
                        out.push(x);
                    }
                }
                out
            }
        }
    }
    Ok(walk(cardinalities))
}

/// Largest configuration space [`realize_arbitrary_permutation`] accepts.
pub const REALIZE_LIMIT: u128 = 16;

/// Trees whose composition (first tree applied first) equals `target`, a
/// permutation of configuration indices in [`ConfigSpace`] order. Each tree
/// swaps two neighbours on the snake path.
pub fn realize_arbitrary_permutation(target: &[usize], cardinalities: &[usize]) -> Result<Vec<Tsp>> {
    let space = ConfigSpace::new(cardinalities);
    let size = space.check_guard(REALIZE_LIMIT)?;
    if target.len() != size {
        return Err(DtfError::DimensionMismatch {
            expected: size,
            got: target.len(),
        });
    }
    let mut seen = vec![false; size];
    for &t in target {
        if t >= size || std::mem::replace(&mut seen[t], true) {
            return Err(DtfError::InvalidArgument("target is not a permutation".into()));
        }
    }
    let snake = snake_path(cardinalities)?;
    let mut position = vec![0; size];
    for (p, x) in snake.iter().enumerate() {
        position[space.index_of(x)] = p;
    }
    // final[q] = snake position whose token ends at q
    let mut arrangement = vec![0; size];
    for (p, x) in snake.iter().enumerate() {
        arrangement[position[target[space.index_of(x)]]] = p;
    }
    // bubble sort the final arrangement back to the identity; replaying the
    // swaps backwards builds it from the identity
    let mut swaps = Vec::new();
    let mut work = arrangement;
    for pass in 0..size {
        for q in 0..size.saturating_sub(1 + pass) {
            if work[q] > work[q + 1] {
                work.swap(q, q + 1);
                swaps.push(q);
            }
        }
    }
    let trees = swaps
        .iter()
        .rev()
        .map(|&q| single_feature_swap_tsp(&snake[q], &snake[q + 1], cardinalities))
        .collect::<Result<Vec<_>>>()?;
    for (i, x) in space.enumerate()?.iter().enumerate() {
        let mut z = x.clone();
        for t in &trees {
            t.forward_in_place(&mut z);
        }
        if space.index_of(&z) != target[i] {
            return Err(DtfError::InvalidArgument(
                "swap decomposition failed to reproduce the target".into(),
            ));
        }
    }
    Ok(trees)
}
