//! Tree-structured permutations: a binary decision tree whose nodes permute
//! configurations on the way from the root to a leaf.

use crate::counts::CountMatrix;
use crate::dataset::CategoricalDataset;
use crate::domain::NodeDomain;
use crate::error::{DtfError, Result};
use crate::perm::IndependentPermutation;
use crate::space::{ConfigSpace, EXHAUSTIVE_LIMIT};

/// Axis-aligned split. `left_values` are in post-permutation coordinates:
/// a configuration goes left when `π_N(x)_feature ∈ left_values`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    feature: usize,
    left_values: Vec<usize>,
    goes_left: Vec<bool>,
}

impl Split {
    pub fn new(feature: usize, left_values: Vec<usize>, cardinality: usize) -> Result<Self> {
        let mut left_values = left_values;
        left_values.sort_unstable();
        left_values.dedup();
        if left_values.is_empty() {
            return Err(DtfError::InvalidTree(format!(
                "split on feature {feature} sends no value left"
            )));
        }
        let mut goes_left = vec![false; cardinality];
        for &a in &left_values {
            if a >= cardinality {
                return Err(DtfError::ValueOutOfRange {
                    feature,
                    value: a,
                    cardinality,
                });
            }
            goes_left[a] = true;
        }
        Ok(Self {
            feature,
            left_values,
            goes_left,
        })
    }

    pub fn feature(&self) -> usize {
        self.feature
    }

    pub fn left_values(&self) -> &[usize] {
        &self.left_values
    }

    #[inline]
    pub fn goes_left(&self, value: usize) -> bool {
        self.goes_left[value]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TspNode {
    pub node_id: usize,
    pub split: Option<Split>,
    pub perm: IndependentPermutation,
    pub domain: NodeDomain,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub depth: usize,
    /// Training-time state; absent on loaded models.
    pub local_perm: Option<IndependentPermutation>,
    pub local_counts_init: Option<CountMatrix>,
    pub local_counts: Option<CountMatrix>,
}

impl TspNode {
    pub fn leaf(node_id: usize, depth: usize, domain: NodeDomain, cardinalities: &[usize]) -> Self {
        Self {
            node_id,
            split: None,
            perm: IndependentPermutation::identity(cardinalities),
            domain,
            left: None,
            right: None,
            depth,
            local_perm: None,
            local_counts_init: None,
            local_counts: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }

    pub fn children(&self) -> Option<(usize, usize)> {
        self.left.zip(self.right)
    }
}

/// Per-node outcome of [`Tsp::check_invertibility`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeAudit {
    pub node_id: usize,
    /// `feature_ok[j]`: the node permutation maps `D_j(N)` onto itself.
    pub feature_ok: Vec<bool>,
    /// The split sends a nonempty proper subset of the reachable values left.
    pub split_ok: bool,
    /// The stored domain agrees with the one implied by the tree.
    pub domain_matches: bool,
}

impl NodeAudit {
    pub fn passed(&self) -> bool {
        self.split_ok && self.domain_matches && self.feature_ok.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvertibilityReport {
    pub nodes: Vec<NodeAudit>,
}

impl InvertibilityReport {
    pub fn passed(&self) -> bool {
        self.nodes.iter().all(NodeAudit::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &NodeAudit> {
        self.nodes.iter().filter(|n| !n.passed())
    }
}

/// A tree-structured permutation `σ_T`. Nodes live in an arena indexed by
/// their breadth-first id; the root is node 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tsp {
    nodes: Vec<TspNode>,
    cardinalities: Vec<usize>,
    max_depth: usize,
}

impl Tsp {
    /// The depth-0 identity tree.
    pub fn identity(cardinalities: &[usize]) -> Self {
        Self {
            nodes: vec![TspNode::leaf(
                0,
                0,
                NodeDomain::full(cardinalities),
                cardinalities,
            )],
            cardinalities: cardinalities.to_vec(),
            max_depth: 0,
        }
    }

    /// Assembles a tree and checks its shape: ids equal arena positions in
    /// breadth-first order, every non-root node has exactly one parent, and
    /// leaves are exactly the nodes without a split.
    ///
    /// Permutations are only required to be bijections here; whether they
    /// respect node domains is the job of [`Tsp::check_invertibility`].
    pub fn from_nodes(
        nodes: Vec<TspNode>,
        cardinalities: Vec<usize>,
        max_depth: usize,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(DtfError::InvalidTree("tree has no nodes".into()));
        }
        let d = cardinalities.len();
        let mut parent_seen = vec![false; nodes.len()];
        parent_seen[0] = true;
        let mut expected_next = 1;
        for (i, node) in nodes.iter().enumerate() {
            if node.node_id != i {
                return Err(DtfError::InvalidTree(format!(
                    "node at position {i} has id {}",
                    node.node_id
                )));
            }
            if node.perm.cardinalities() != cardinalities {
                return Err(DtfError::InvalidTree(format!(
                    "node {i} permutation has the wrong shape"
                )));
            }
            if node.domain.n_features() != d {
                return Err(DtfError::InvalidTree(format!(
                    "node {i} domain has the wrong width"
                )));
            }
            match (&node.split, node.left, node.right) {
                (None, None, None) => {}
                (Some(split), Some(l), Some(r)) => {
                    if split.feature >= d {
                        return Err(DtfError::InvalidTree(format!(
                            "node {i} splits on feature {} of {d}",
                            split.feature
                        )));
                    }
                    if split.goes_left.len() != cardinalities[split.feature] {
                        return Err(DtfError::InvalidTree(format!(
                            "node {i} split table has the wrong length"
                        )));
                    }
                    // breadth-first ids: children are allocated in visiting order
                    if l != expected_next || r != expected_next + 1 || r >= nodes.len() {
                        return Err(DtfError::InvalidTree(format!(
                            "children of node {i} are not in breadth-first order"
                        )));
                    }
                    expected_next += 2;
                    for c in [l, r] {
                        if parent_seen[c] {
                            return Err(DtfError::InvalidTree(format!(
                                "node {c} has more than one parent"
                            )));
                        }
                        parent_seen[c] = true;
                        if nodes[c].depth != node.depth + 1 {
                            return Err(DtfError::InvalidTree(format!(
                                "node {c} has inconsistent depth"
                            )));
                        }
                    }
                }
                _ => {
                    return Err(DtfError::InvalidTree(format!(
                        "node {i} must have a split and two children, or neither"
                    )))
                }
            }
        }
        if expected_next != nodes.len() {
            return Err(DtfError::InvalidTree("tree has unreachable nodes".into()));
        }
        if nodes[0].depth != 0 {
            return Err(DtfError::InvalidTree("root depth must be 0".into()));
        }
        if let Some(deepest) = nodes.iter().map(|n| n.depth).max() {
            if deepest > max_depth {
                return Err(DtfError::InvalidTree(format!(
                    "tree depth {deepest} exceeds its max depth {max_depth}"
                )));
            }
        }
        Ok(Self {
            nodes,
            cardinalities,
            max_depth,
        })
    }

    pub fn into_nodes(self) -> Vec<TspNode> {
        self.nodes
    }

    pub fn nodes(&self) -> &[TspNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TspNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> &TspNode {
        &self.nodes[0]
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn n_features(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn leaf_ids(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter(|n| n.is_leaf())
            .map(|n| n.node_id)
            .collect()
    }

    /// `parents[i]` is the parent of node `i`; `None` for the root.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parents = vec![None; self.nodes.len()];
        for node in &self.nodes {
            if let Some((l, r)) = node.children() {
                parents[l] = Some(node.node_id);
                parents[r] = Some(node.node_id);
            }
        }
        parents
    }

    /// Whether every node permutation is the identity.
    pub fn is_identity(&self) -> bool {
        self.nodes.iter().all(|n| n.perm.is_identity())
    }

    /// Non-identity permutation entries plus two per node (split feature and value).
    pub fn parameter_count(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.perm.moved_entries() + 2)
            .sum()
    }

    /// Forward pass on an in-range configuration, in place. Returns the leaf id.
    pub fn forward_in_place(&self, x: &mut [usize]) -> usize {
        let mut id = 0;
        loop {
            let node = &self.nodes[id];
            node.perm.apply_in_place(x);
            match (&node.split, node.left, node.right) {
                (Some(split), Some(l), Some(r)) => {
                    id = if split.goes_left(x[split.feature]) { l } else { r };
                }
                _ => return id,
            }
        }
    }

    pub fn forward(&self, x: &[usize]) -> Result<(Vec<usize>, usize)> {
        CategoricalDataset::check_config(&self.cardinalities, x)?;
        let mut z = x.to_vec();
        let leaf = self.forward_in_place(&mut z);
        Ok((z, leaf))
    }

    /// Root-to-leaf path followed by routing `z` on its raw values, with no
    /// permutations applied.
    pub fn route_raw(&self, z: &[usize]) -> Vec<usize> {
        let mut path = vec![0];
        let mut id = 0;
        loop {
            let node = &self.nodes[id];
            match (&node.split, node.left, node.right) {
                (Some(split), Some(l), Some(r)) => {
                    id = if split.goes_left(z[split.feature]) { l } else { r };
                    path.push(id);
                }
                _ => break,
            }
        }
        path
    }

    /// Inverse pass, in place: recover the path from the output, then undo
    /// the node permutations from the leaf back to the root.
    pub fn inverse_in_place(&self, z: &mut [usize]) {
        let path = self.route_raw(z);
        for &id in path.iter().rev() {
            self.nodes[id].perm.apply_inverse_in_place(z);
        }
    }

    pub fn inverse(&self, z: &[usize]) -> Result<Vec<usize>> {
        CategoricalDataset::check_config(&self.cardinalities, z)?;
        let mut x = z.to_vec();
        self.inverse_in_place(&mut x);
        Ok(x)
    }

    pub fn transform(&self, data: &CategoricalDataset) -> Result<CategoricalDataset> {
        if data.cardinalities() != self.cardinalities.as_slice() {
            return Err(DtfError::InvalidArgument(
                "dataset cardinalities differ from the tree's".into(),
            ));
        }
        Ok(data.map_rows(|row| {
            let mut z = row.to_vec();
            self.forward_in_place(&mut z);
            z
        }))
    }

    /// Node domains implied by the permutations and splits: the root holds
    /// everything, and each child receives the parent's domain mapped through
    /// the parent's permutation, restricted on the split feature.
    pub fn computed_domains(&self) -> Vec<NodeDomain> {
        let mut domains: Vec<Option<NodeDomain>> = vec![None; self.nodes.len()];
        domains[0] = Some(NodeDomain::full(&self.cardinalities));
        for node in &self.nodes {
            let Some((l, r)) = node.children() else {
                continue;
            };
            let here = domains[node.node_id].as_ref().expect("parents precede children");
            let mapped = here.mapped(&node.perm);
            let split = node.split.as_ref().expect("internal node");
            let (ld, rd) = mapped.split(split.feature, &split.left_values);
            domains[l] = Some(ld);
            domains[r] = Some(rd);
        }
        domains.into_iter().map(|d| d.expect("every node reached")).collect()
    }

    /// Checks that each node permutation maps its node domain onto itself,
    /// feature by feature, and that every split is a proper partition.
    pub fn check_invertibility(&self) -> InvertibilityReport {
        let domains = self.computed_domains();
        let nodes = self
            .nodes
            .iter()
            .zip(&domains)
            .map(|(node, dom)| {
                let feature_ok = dom.is_preserved_by(&node.perm);
                let split_ok = match &node.split {
                    None => true,
                    Some(split) => {
                        let reachable = node.perm.image_of(split.feature, dom.feature(split.feature));
                        let inside = split
                            .left_values
                            .iter()
                            .all(|a| reachable.binary_search(a).is_ok());
                        inside && split.left_values.len() < reachable.len()
                    }
                };
                NodeAudit {
                    node_id: node.node_id,
                    feature_ok,
                    split_ok,
                    domain_matches: node.domain == *dom,
                }
            })
            .collect();
        InvertibilityReport { nodes }
    }

    /// Runs the forward map over the whole configuration space and reports
    /// whether it is a permutation of it.
    pub fn check_bijection_exhaustive(&self) -> Result<bool> {
        let space = ConfigSpace::new(&self.cardinalities);
        let size = space.check_guard(EXHAUSTIVE_LIMIT)?;
        let mut seen = vec![false; size];
        for i in 0..size {
            let mut z = space.config_at(i);
            self.forward_in_place(&mut z);
            let idx = space.index_of(&z);
            if seen[idx] {
                return Ok(false);
            }
            seen[idx] = true;
        }
        Ok(true)
    }

    /// Counts of the transformed data at every node, indexed by node id: a
    /// transformed point contributes to each node whose domain contains it.
    pub fn node_counts(&self, data: &CategoricalDataset) -> Result<Vec<CountMatrix>> {
        let transformed = self.transform(data)?;
        let mut counts = vec![CountMatrix::zeros(&self.cardinalities); self.nodes.len()];
        for z in transformed.rows() {
            for id in self.route_raw(z) {
                counts[id].add_config(z);
            }
        }
        Ok(counts)
    }

    /// Leaf reached by each row under the forward pass.
    pub fn leaves_of(&self, data: &CategoricalDataset) -> Vec<usize> {
        data.rows()
            .map(|row| {
                let mut z = row.to_vec();
                self.forward_in_place(&mut z)
            })
            .collect()
    }

    /// Drops training-time state so the tree matches what a model file holds.
    pub fn without_training_state(mut self) -> Self {
        for node in &mut self.nodes {
            node.local_perm = None;
            node.local_counts_init = None;
            node.local_counts = None;
        }
        self
    }
}
