//! Independent categorical base distribution and the composed flow model.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::counts::CountMatrix;
use crate::dataset::CategoricalDataset;
use crate::error::{DtfError, Result};
use crate::learn::{fit_tsp_with_rng, Criterion, FitConfig};
use crate::tsp::Tsp;

/// Per-feature categorical distribution with additive smoothing.
///
/// Stored as raw counts plus the pseudocount so that probabilities can be
/// recomputed exactly after a round trip through a model file.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentBase {
    counts: CountMatrix,
    n: u64,
    pseudocount: f64,
    log_probs: Vec<Vec<f64>>,
}

impl IndependentBase {
    pub fn from_counts(counts: CountMatrix, pseudocount: f64) -> Result<Self> {
        if !(pseudocount >= 0.0 && pseudocount.is_finite()) {
            return Err(DtfError::InvalidArgument(format!(
                "pseudocount must be finite and nonnegative, got {pseudocount}"
            )));
        }
        if counts.n_features() == 0 {
            return Err(DtfError::InvalidArgument("base needs at least one feature".into()));
        }
        let n = counts.row_total(0);
        if (0..counts.n_features()).any(|j| counts.row_total(j) != n) {
            return Err(DtfError::InvalidArgument(
                "count rows must have equal totals".into(),
            ));
        }
        if n == 0 && pseudocount == 0.0 {
            return Err(DtfError::EmptyDataset);
        }
        let log_probs = counts
            .rows()
            .iter()
            .map(|row| {
                let denom = n as f64 + pseudocount * row.len() as f64;
                row.iter()
                    .map(|&c| ((c as f64 + pseudocount) / denom).ln())
                    .collect()
            })
            .collect();
        Ok(Self {
            counts,
            n,
            pseudocount,
            log_probs,
        })
    }

    /// A uniform base, equivalent to zero counts with a positive pseudocount.
    pub fn uniform(cardinalities: &[usize]) -> Self {
        Self::from_counts(CountMatrix::zeros(cardinalities), 1.0).expect("positive pseudocount")
    }

    pub fn counts(&self) -> &CountMatrix {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn pseudocount(&self) -> f64 {
        self.pseudocount
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.counts.cardinalities()
    }

    pub fn prob(&self, j: usize, a: usize) -> f64 {
        self.log_probs[j][a].exp()
    }

    pub fn probs(&self) -> Vec<Vec<f64>> {
        self.log_probs
            .iter()
            .map(|row| row.iter().map(|l| l.exp()).collect())
            .collect()
    }

    /// `Σ_j ln Q_j(z_j)`; `-∞` when some factor has zero probability.
    pub fn log_prob(&self, z: &[usize]) -> f64 {
        z.iter().enumerate().map(|(j, &a)| self.log_probs[j][a]).sum()
    }
}

/// `probs[j][a] = (count(j,a) + α) / (n + α k_j)`.
pub fn fit_base(data: &CategoricalDataset, pseudocount: f64) -> Result<IndependentBase> {
    if data.is_empty() {
        return Err(DtfError::EmptyDataset);
    }
    IndependentBase::from_counts(data.counts(), pseudocount)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitMetadata {
    pub criterion: Criterion,
    pub seed: u64,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub num_tsps: usize,
    /// Mean unsmoothed train NLL per sample: before any tree, then after each one.
    pub trace: Vec<f64>,
}

/// A composition of trees followed by an independent base distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DtfModel {
    tsps: Vec<Tsp>,
    base: IndependentBase,
    cardinalities: Vec<usize>,
    metadata: Option<FitMetadata>,
}

/// Mean NLL of a dataset, with rows of zero likelihood kept apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NllSummary {
    pub n_rows: usize,
    /// Rows with zero likelihood under the model.
    pub n_infinite: usize,
    /// Mean over rows with finite NLL; NaN when there are none.
    pub mean_finite: f64,
}

impl NllSummary {
    /// Mean over all rows, `+∞` if any row has zero likelihood.
    pub fn mean(&self) -> f64 {
        if self.n_infinite > 0 {
            f64::INFINITY
        } else {
            self.mean_finite
        }
    }
}

impl DtfModel {
    pub fn new(tsps: Vec<Tsp>, base: IndependentBase, metadata: Option<FitMetadata>) -> Result<Self> {
        let cardinalities = base.cardinalities();
        for (i, t) in tsps.iter().enumerate() {
            if t.cardinalities() != cardinalities.as_slice() {
                return Err(DtfError::InvalidArgument(format!(
                    "tree {i} has different cardinalities from the base"
                )));
            }
        }
        Ok(Self {
            tsps,
            base,
            cardinalities,
            metadata,
        })
    }

    pub fn tsps(&self) -> &[Tsp] {
        &self.tsps
    }

    pub fn base(&self) -> &IndependentBase {
        &self.base
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn metadata(&self) -> Option<&FitMetadata> {
        self.metadata.as_ref()
    }

    pub fn with_base(mut self, base: IndependentBase) -> Result<Self> {
        if base.cardinalities() != self.cardinalities {
            return Err(DtfError::InvalidArgument("base shape differs from the model".into()));
        }
        self.base = base;
        Ok(self)
    }

    pub fn parameter_count(&self) -> usize {
        self.tsps.iter().map(Tsp::parameter_count).sum()
    }

    /// `f(x) = σ_T ∘ … ∘ σ_1 (x)`.
    pub fn forward(&self, x: &[usize]) -> Result<Vec<usize>> {
        CategoricalDataset::check_config(&self.cardinalities, x)?;
        let mut z = x.to_vec();
        for t in &self.tsps {
            t.forward_in_place(&mut z);
        }
        Ok(z)
    }

    pub fn inverse(&self, z: &[usize]) -> Result<Vec<usize>> {
        CategoricalDataset::check_config(&self.cardinalities, z)?;
        let mut x = z.to_vec();
        for t in self.tsps.iter().rev() {
            t.inverse_in_place(&mut x);
        }
        Ok(x)
    }

    /// `ln P(x) = ln Q(f(x))`; permutations carry no volume term.
    pub fn log_likelihood(&self, x: &[usize]) -> Result<f64> {
        let z = self.forward(x)?;
        Ok(self.base.log_prob(&z))
    }

    pub fn transform(&self, data: &CategoricalDataset) -> Result<CategoricalDataset> {
        self.check_data(data)?;
        Ok(data.map_rows(|row| self.forward(row).expect("checked")))
    }

    fn check_data(&self, data: &CategoricalDataset) -> Result<()> {
        if data.n_features() != self.cardinalities.len() {
            return Err(DtfError::DimensionMismatch {
                expected: self.cardinalities.len(),
                got: data.n_features(),
            });
        }
        let mismatch = data
            .cardinalities()
            .iter()
            .zip(&self.cardinalities)
            .position(|(a, b)| a != b);
        if let Some(j) = mismatch {
            return Err(DtfError::CardinalityMismatch {
                feature: j,
                expected: self.cardinalities[j],
                got: data.cardinalities()[j],
            });
        }
        Ok(())
    }

    /// Per-row NLL in nats (`+∞` for zero-likelihood rows).
    pub fn nll_per_row(&self, data: &CategoricalDataset) -> Result<Vec<f64>> {
        self.check_data(data)?;
        data.rows()
            .map(|row| self.log_likelihood(row).map(|l| -l))
            .collect()
    }

    pub fn nll(&self, data: &CategoricalDataset) -> Result<NllSummary> {
        let per_row = self.nll_per_row(data)?;
        let finite: Vec<f64> = per_row.iter().copied().filter(|v| v.is_finite()).collect();
        let mean_finite = if finite.is_empty() {
            f64::NAN
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        };
        Ok(NllSummary {
            n_rows: per_row.len(),
            n_infinite: per_row.len() - finite.len(),
            mean_finite,
        })
    }

    /// Draws `count` rows: independent base draws pushed through the tree
    /// inverses in reverse order.
    pub fn sample(&self, count: usize, seed: u64) -> Result<CategoricalDataset> {
        self.sample_with_latents(count, seed).map(|(x, _)| x)
    }

    /// Like [`DtfModel::sample`], also returning the base draws `z` with
    /// `forward(x_i) = z_i`.
    pub fn sample_with_latents(
        &self,
        count: usize,
        seed: u64,
    ) -> Result<(CategoricalDataset, CategoricalDataset)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dists = self
            .base
            .probs()
            .into_iter()
            .enumerate()
            .map(|(j, row)| {
                WeightedIndex::new(row).map_err(|_| {
                    DtfError::InvalidArgument(format!("base row {j} has no probability mass"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let d = self.cardinalities.len();
        let mut xs = Vec::with_capacity(count * d);
        let mut zs = Vec::with_capacity(count * d);
        let mut z = vec![0; d];
        for _ in 0..count {
            for (slot, dist) in z.iter_mut().zip(&dists) {
                *slot = dist.sample(&mut rng);
            }
            let mut x = z.clone();
            for t in self.tsps.iter().rev() {
                t.inverse_in_place(&mut x);
            }
            xs.extend_from_slice(&x);
            zs.extend_from_slice(&z);
        }
        Ok((
            CategoricalDataset::from_flat(xs, self.cardinalities.clone())?,
            CategoricalDataset::from_flat(zs, self.cardinalities.clone())?,
        ))
    }
}

/// Everything produced while fitting a model.
#[derive(Debug, Clone)]
pub struct DtfFit {
    pub model: DtfModel,
    /// Identity-permutation structure of each stage, before the two-pass learner.
    pub structures: Vec<Tsp>,
    /// Training data after all stages.
    pub transformed: CategoricalDataset,
}

/// Fits `cfg.num_tsps` trees greedily, each on the previous stage's output,
/// then the base on the final output with the given pseudocount.
///
/// The random criterion draws from one generator seeded by `cfg.seed` and
/// shared across stages.
pub fn fit_dtf(train: &CategoricalDataset, cfg: &FitConfig, pseudocount: f64) -> Result<DtfFit> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(DtfError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = train.clone();
    let mut trace = vec![current.marginal_entropy()];
    let mut tsps = Vec::with_capacity(cfg.num_tsps);
    let mut structures = Vec::with_capacity(cfg.num_tsps);
    for _ in 0..cfg.num_tsps {
        let fitted = fit_tsp_with_rng(&current, cfg, &mut rng)?;
        current = fitted.transformed;
        trace.push(current.marginal_entropy());
        tsps.push(fitted.tsp);
        structures.push(fitted.structure);
    }
    let base = fit_base(&current, pseudocount)?;
    let metadata = FitMetadata {
        criterion: cfg.criterion,
        seed: cfg.seed,
        max_depth: cfg.max_depth,
        min_samples_split: cfg.min_samples_split,
        num_tsps: cfg.num_tsps,
        trace,
    };
    Ok(DtfFit {
        model: DtfModel::new(tsps, base, Some(metadata))?,
        structures,
        transformed: current,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_formula() {
        let b = IndependentBase::from_counts(CountMatrix::from_rows(vec![vec![2, 2]]), 0.0).unwrap();
        assert_eq!(b.probs(), vec![vec![0.5, 0.5]]);
        let b = IndependentBase::from_counts(CountMatrix::from_rows(vec![vec![3, 1]]), 1.0).unwrap();
        let p = b.probs();
        assert!((p[0][0] - 4.0 / 6.0).abs() < 1e-15);
        assert!((p[0][1] - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zero_count_without_smoothing_is_impossible_not_an_error() {
        let b = IndependentBase::from_counts(CountMatrix::from_rows(vec![vec![4, 0]]), 0.0).unwrap();
        assert_eq!(b.prob(0, 1), 0.0);
        assert_eq!(b.log_prob(&[1]), f64::NEG_INFINITY);
        let m = DtfModel::new(vec![], b, None).unwrap();
        let data = CategoricalDataset::new(vec![vec![0], vec![1]], vec![2]).unwrap();
        let s = m.nll(&data).unwrap();
        assert_eq!(s.n_infinite, 1);
        assert!(s.mean().is_infinite());
        assert!(s.mean_finite.abs() < 1e-15);
    }

    #[test]
    fn uniform_base_without_trees() {
        let m = DtfModel::new(vec![], IndependentBase::uniform(&[2, 2]), None).unwrap();
        for x in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let l = m.log_likelihood(&x).unwrap();
            assert!((l + 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_bases_are_rejected() {
        assert!(IndependentBase::from_counts(CountMatrix::zeros(&[2]), 0.0).is_err());
        assert!(IndependentBase::from_counts(CountMatrix::from_rows(vec![vec![1], vec![2]]), 1.0).is_err());
        assert!(IndependentBase::from_counts(CountMatrix::from_rows(vec![vec![1]]), -1.0).is_err());
    }
}
