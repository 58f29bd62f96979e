use crate::perm::IndependentPermutation;

/// The per-feature sets of values that can reach a node, `D_j(N)`.
///
/// Each set is kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeDomain {
    per_feature: Vec<Vec<usize>>,
}

impl NodeDomain {
    /// The root domain: every category of every feature.
    pub fn full(cardinalities: &[usize]) -> Self {
        Self {
            per_feature: cardinalities.iter().map(|&k| (0..k).collect()).collect(),
        }
    }

    pub fn from_sets(mut per_feature: Vec<Vec<usize>>) -> Self {
        for set in &mut per_feature {
            set.sort_unstable();
            set.dedup();
        }
        Self { per_feature }
    }

    pub fn n_features(&self) -> usize {
        self.per_feature.len()
    }

    pub fn feature(&self, j: usize) -> &[usize] {
        &self.per_feature[j]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.per_feature
    }

    pub fn contains_value(&self, j: usize, a: usize) -> bool {
        self.per_feature[j].binary_search(&a).is_ok()
    }

    pub fn contains(&self, x: &[usize]) -> bool {
        x.iter()
            .enumerate()
            .all(|(j, &a)| self.contains_value(j, a))
    }

    pub fn is_nonempty(&self) -> bool {
        self.per_feature.iter().all(|s| !s.is_empty())
    }

    /// Features with at least two values left, i.e. ones that can still be split.
    pub fn splittable_features(&self) -> Vec<usize> {
        (0..self.per_feature.len())
            .filter(|&j| self.per_feature[j].len() >= 2)
            .collect()
    }

    /// Child domains after routing on `left_values` of `feature`. The values
    /// are assumed to be in the same coordinates as this domain.
    pub fn split(&self, feature: usize, left_values: &[usize]) -> (Self, Self) {
        let mut left = self.clone();
        let mut right = self.clone();
        left.per_feature[feature] = self.per_feature[feature]
            .iter()
            .copied()
            .filter(|a| left_values.contains(a))
            .collect();
        right.per_feature[feature] = self.per_feature[feature]
            .iter()
            .copied()
            .filter(|a| !left_values.contains(a))
            .collect();
        (left, right)
    }

    /// Image of every per-feature set under `p`.
    pub fn mapped(&self, p: &IndependentPermutation) -> Self {
        Self {
            per_feature: self
                .per_feature
                .iter()
                .enumerate()
                .map(|(j, set)| p.image_of(j, set))
                .collect(),
        }
    }

    /// Whether `p` maps each `D_j` onto itself.
    pub fn is_preserved_by(&self, p: &IndependentPermutation) -> Vec<bool> {
        self.per_feature
            .iter()
            .enumerate()
            .map(|(j, set)| p.image_of(j, set) == *set)
            .collect()
    }
}
