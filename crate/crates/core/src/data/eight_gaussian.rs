use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::CategoricalDataset;
use crate::error::{DtfError, Result};

/// Mixture of eight isotropic Gaussians with means evenly spaced on a circle,
/// discretized per axis into equal-width bins over `[-half_range, half_range]`.
/// Points outside the range fall into the edge bins.
#[derive(Debug, Clone, PartialEq)]
pub struct EightGaussianSpec {
    pub n: usize,
    pub n_train: usize,
    pub radius: f64,
    pub std: f64,
    pub bins: usize,
    pub half_range: f64,
    pub seed: u64,
}

impl Default for EightGaussianSpec {
    fn default() -> Self {
        Self {
            n: 12_800,
            n_train: 10_240,
            radius: 4.0,
            std: 0.5,
            bins: 91,
            half_range: 11.375,
            seed: 0,
        }
    }
}

impl EightGaussianSpec {
    pub fn bin_width(&self) -> f64 {
        2.0 * self.half_range / self.bins as f64
    }

    pub fn bin_of(&self, value: f64) -> usize {
        let scaled = ((value + self.half_range) / self.bin_width()).floor();
        scaled.clamp(0.0, (self.bins - 1) as f64) as usize
    }

    /// Center of a bin, for plotting.
    pub fn bin_center(&self, bin: usize) -> f64 {
        -self.half_range + (bin as f64 + 0.5) * self.bin_width()
    }

    pub fn means(&self) -> Vec<(f64, f64)> {
        (0..8)
            .map(|m| {
                let angle = m as f64 * std::f64::consts::FRAC_PI_4;
                (self.radius * angle.cos(), self.radius * angle.sin())
            })
            .collect()
    }
}

/// Draws `n` points (component uniformly, then the Gaussian), bins them, and
/// returns the first `n_train` rows as train and the rest as test.
pub fn gen_eight_gaussian(
    spec: &EightGaussianSpec,
) -> Result<(CategoricalDataset, CategoricalDataset)> {
    if spec.n < 2 || spec.n_train == 0 || spec.n_train >= spec.n {
        return Err(DtfError::InvalidArgument(format!(
            "need 0 < n_train < n with n >= 2, got n={} n_train={}",
            spec.n, spec.n_train
        )));
    }
    if spec.bins < 2 || !(spec.half_range > 0.0) || !(spec.std > 0.0) {
        return Err(DtfError::InvalidArgument(
            "bins >= 2, half_range > 0 and std > 0 are required".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let means = spec.means();
    let mut values = Vec::with_capacity(spec.n * 2);
    for _ in 0..spec.n {
        let (mx, my) = means[rng.random_range(0..8)];
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        values.push(spec.bin_of(mx + spec.std * dx));
        values.push(spec.bin_of(my + spec.std * dy));
    }
    let all = CategoricalDataset::from_flat(values, vec![spec.bins, spec.bins])?
        .with_column_names(vec!["x0".into(), "x1".into()])?;
    let train: Vec<usize> = (0..spec.n_train).collect();
    let test: Vec<usize> = (spec.n_train..spec.n).collect();
    Ok((all.select(&train), all.select(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning_clamps_at_the_edges() {
        let s = EightGaussianSpec::default();
        assert_eq!(s.bin_of(-100.0), 0);
        assert_eq!(s.bin_of(100.0), 90);
        assert_eq!(s.bin_of(0.0), 45);
        assert!((s.bin_center(45)).abs() < 1e-12);
    }

    #[test]
    fn shapes_and_determinism() {
        let s = EightGaussianSpec {
            n: 500,
            n_train: 400,
            seed: 9,
            ..Default::default()
        };
        let (a, b) = gen_eight_gaussian(&s).unwrap();
        assert_eq!(a.cardinalities(), &[91, 91]);
        assert_eq!((a.n_rows(), b.n_rows()), (400, 100));
        assert_eq!(gen_eight_gaussian(&s).unwrap().0, a);
    }
}
