use std::collections::VecDeque;

use rand_chacha::ChaCha8Rng;

use super::split::find_best_split;
use super::FitConfig;
use crate::dataset::CategoricalDataset;
use crate::domain::NodeDomain;
use crate::error::{DtfError, Result};
use crate::tsp::{Split, Tsp, TspNode};

struct Pending {
    id: usize,
    depth: usize,
    rows: Vec<usize>,
    domain: NodeDomain,
}

/// Grows the split structure breadth-first with identity permutations.
///
/// A node becomes a leaf when it holds fewer than `min_samples_split` rows,
/// sits at `max_depth`, or has no feature left to split. Leaves record the
/// counts of their rows as the initial local counts.
pub fn construct_tree(
    data: &CategoricalDataset,
    cfg: &FitConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Tsp> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(DtfError::EmptyDataset);
    }
    let cards = data.cardinalities().to_vec();
    let mut nodes: Vec<TspNode> = Vec::new();
    let mut queue = VecDeque::new();
    nodes.push(TspNode::leaf(0, 0, NodeDomain::full(&cards), &cards));
    queue.push_back(Pending {
        id: 0,
        depth: 0,
        rows: (0..data.n_rows()).collect(),
        domain: NodeDomain::full(&cards),
    });
    while let Some(p) = queue.pop_front() {
        let candidate = if p.rows.len() >= cfg.min_samples_split && p.depth < cfg.max_depth {
            find_best_split(data, &p.rows, &p.domain, cfg.criterion, rng)
        } else {
            None
        };
        let Some(candidate) = candidate else {
            nodes[p.id].local_counts_init = Some(data.counts_of(&p.rows));
            continue;
        };
        let s = candidate.feature;
        let split = Split::new(s, candidate.left_values, cards[s])?;
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            p.rows.iter().partition(|&&i| split.goes_left(data.row(i)[s]));
        let (left_dom, right_dom) = p.domain.split(s, split.left_values());
        let left_id = nodes.len();
        let right_id = left_id + 1;
        nodes.push(TspNode::leaf(left_id, p.depth + 1, left_dom.clone(), &cards));
        nodes.push(TspNode::leaf(right_id, p.depth + 1, right_dom.clone(), &cards));
        let node = &mut nodes[p.id];
        node.split = Some(split);
        node.left = Some(left_id);
        node.right = Some(right_id);
        queue.push_back(Pending {
            id: left_id,
            depth: p.depth + 1,
            rows: left_rows,
            domain: left_dom,
        });
        queue.push_back(Pending {
            id: right_id,
            depth: p.depth + 1,
            rows: right_rows,
            domain: right_dom,
        });
    }
    Tsp::from_nodes(nodes, cards, cfg.max_depth)
}
