//! Learning a single tree-structured permutation: greedy structure search
//! followed by the two-pass permutation learner.

mod rank;
mod split;
mod structure;
mod two_pass;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::CategoricalDataset;
use crate::error::{DtfError, Result};
use crate::tsp::Tsp;

pub use rank::{check_rank_consistency, rank_consistent_under};
pub use split::{find_best_split, min_perm_nll, SplitCandidate};
pub use structure::construct_tree;
pub use two_pass::{construct_equivalent_tree, learn_local_permutations, sort_1d};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Greedy local permutation: minimum permuted NLL over singleton splits.
    Glp,
    /// Uniform feature, then uniform value from its domain.
    Random,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Glp => "glp",
            Criterion::Random => "random",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = DtfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "glp" => Ok(Criterion::Glp),
            "random" => Ok(Criterion::Random),
            other => Err(DtfError::InvalidArgument(format!(
                "unknown criterion `{other}` (expected glp or random)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitConfig {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub criterion: Criterion,
    pub seed: u64,
    pub num_tsps: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_depth: 2,
            min_samples_split: 2,
            criterion: Criterion::Glp,
            seed: 0,
            num_tsps: 1,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(DtfError::InvalidArgument(
                "min_samples_split must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Result of fitting one tree.
#[derive(Debug, Clone)]
pub struct FittedTsp {
    /// The learned tree, with training-time local state kept on its nodes.
    pub tsp: Tsp,
    /// Same structure with identity permutations, as produced by the split search.
    pub structure: Tsp,
    /// Training data pushed through `tsp`.
    pub transformed: CategoricalDataset,
}

pub fn fit_tsp(data: &CategoricalDataset, cfg: &FitConfig) -> Result<FittedTsp> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    fit_tsp_with_rng(data, cfg, &mut rng)
}

/// Structure search, bottom-up local sorting, then top-down rebuild into an
/// equivalent tree that satisfies the invertibility constraint.
pub fn fit_tsp_with_rng(
    data: &CategoricalDataset,
    cfg: &FitConfig,
    rng: &mut ChaCha8Rng,
) -> Result<FittedTsp> {
    let structure = learn_local_permutations(construct_tree(data, cfg, rng)?)?;
    let tsp = construct_equivalent_tree(&structure)?;
    let transformed = tsp.transform(data)?;
    Ok(FittedTsp {
        tsp,
        structure,
        transformed,
    })
}
