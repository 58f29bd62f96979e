use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::CategoricalDataset;
use crate::error::{DtfError, Result};

/// Named dependency strengths for the binary copula datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CopulaLevel {
    High,
    Moderate,
    Weak,
}

impl CopulaLevel {
    /// Total correlation of the Gaussian layer, in nats.
    pub fn total_correlation(self) -> f64 {
        match self {
            CopulaLevel::High => 100.0,
            CopulaLevel::Moderate => 10.0,
            CopulaLevel::Weak => 1.0,
        }
    }
}

/// Gaussian copula over a cycle graph with Bernoulli marginals.
///
/// The precision matrix is `I − wA` with `A` the cycle's adjacency matrix.
/// It is parametrized by its smallest eigenvalue `g = 1 − 2w ∈ (0, 1]`,
/// which keeps strong dependence representable: a total correlation of 100
/// nats on four features needs `g` around `1e-29`.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaSpec {
    pub d: usize,
    pub target_total_correlation: f64,
    pub bernoulli_p: Vec<f64>,
    pub n: usize,
    pub n_train: usize,
    pub seed: u64,
}

impl Default for CopulaSpec {
    fn default() -> Self {
        Self {
            d: 4,
            target_total_correlation: 100.0,
            bernoulli_p: vec![0.5, 0.3, 0.5, 0.2],
            n: 10_000,
            n_train: 8_000,
            seed: 0,
        }
    }
}

/// Eigenvalues of the cycle precision matrix with smallest eigenvalue `gap`.
/// The cycle's adjacency matrix is circulant, so its spectrum is `2cos(2πk/d)`.
fn precision_spectrum(d: usize, gap: f64) -> Vec<f64> {
    let w2 = 1.0 - gap;
    (0..d)
        .map(|k| {
            if k == 0 {
                gap
            } else {
                1.0 - w2 * (2.0 * std::f64::consts::PI * k as f64 / d as f64).cos()
            }
        })
        .collect()
}

/// `−½ ln det R` for the correlation matrix implied by the cycle precision
/// with smallest eigenvalue `gap`. All diagonal entries of the covariance are
/// equal to the mean of the inverse eigenvalues.
pub fn copula_total_correlation(d: usize, gap: f64) -> f64 {
    let spectrum = precision_spectrum(d, gap);
    let log_det_precision: f64 = spectrum.iter().map(|t| t.ln()).sum();
    let variance = spectrum.iter().map(|t| 1.0 / t).sum::<f64>() / d as f64;
    0.5 * (log_det_precision + d as f64 * variance.ln())
}

/// Bisection on `ln g ∈ [−700, 0]` for the gap reaching the target total
/// correlation.
pub fn solve_gap(d: usize, target: f64) -> Result<f64> {
    if d < 3 {
        return Err(DtfError::InvalidArgument("a cycle needs at least 3 features".into()));
    }
    if !(target >= 0.0 && target.is_finite()) {
        return Err(DtfError::InvalidArgument(format!(
            "total correlation must be finite and nonnegative, got {target}"
        )));
    }
    if target == 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (-700.0f64, 0.0f64);
    if copula_total_correlation(d, lo.exp()) < target {
        return Err(DtfError::InvalidArgument(format!(
            "total correlation {target} is out of reach for a {d}-cycle"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let tc = copula_total_correlation(d, mid.exp());
        if (tc - target).abs() < 1e-10 {
            return Ok(mid.exp());
        }
        // total correlation grows as the gap shrinks
        if tc > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Real orthonormal eigenbasis of a circulant matrix of size `d`, as columns
/// paired with the index of their eigenvalue.
fn fourier_basis(d: usize) -> Vec<(usize, Vec<f64>)> {
    let df = d as f64;
    let mut basis = vec![(0, vec![1.0 / df.sqrt(); d])];
    for k in 1..d.div_ceil(2) {
        let angle = |m: usize| 2.0 * std::f64::consts::PI * (k * m) as f64 / df;
        let scale = (2.0 / df).sqrt();
        basis.push((k, (0..d).map(|m| scale * angle(m).cos()).collect()));
        basis.push((k, (0..d).map(|m| scale * angle(m).sin()).collect()));
    }
    if d.is_multiple_of(2) {
        let sign = |m: usize| if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        basis.push((d / 2, (0..d).map(|m| sign(m) / df.sqrt()).collect()));
    }
    basis
}

/// Samples the latent Gaussian through its spectral factorization, then
/// standardizes each column empirically, maps it through the standard normal
/// CDF, and thresholds with the Bernoulli inverse CDF (`1` iff `u > 1 − p`).
/// The first `n_train` rows form the train set.
pub fn gen_copula(spec: &CopulaSpec) -> Result<(CategoricalDataset, CategoricalDataset)> {
    if spec.bernoulli_p.len() != spec.d {
        return Err(DtfError::DimensionMismatch {
            expected: spec.d,
            got: spec.bernoulli_p.len(),
        });
    }
    if let Some(p) = spec.bernoulli_p.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(DtfError::InvalidArgument(format!(
            "Bernoulli parameters must lie in (0, 1), got {p}"
        )));
    }
    if spec.n < 2 || spec.n_train == 0 || spec.n_train >= spec.n {
        return Err(DtfError::InvalidArgument(format!(
            "need 0 < n_train < n with n >= 2, got n={} n_train={}",
            spec.n, spec.n_train
        )));
    }
    let d = spec.d;
    let gap = solve_gap(d, spec.target_total_correlation)?;
    let spectrum = precision_spectrum(d, gap);
    let basis = fourier_basis(d);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut latent = vec![0.0f64; spec.n * d];
    for row in latent.chunks_exact_mut(d) {
        for (k, column) in &basis {
            let z: f64 = rng.sample(StandardNormal);
            let scale = z / spectrum[*k].sqrt();
            for (slot, u) in row.iter_mut().zip(column) {
                *slot += scale * u;
            }
        }
    }
    let n = spec.n as f64;
    let mut values = vec![0usize; spec.n * d];
    for j in 0..d {
        let column = latent.iter().skip(j).step_by(d);
        let mean = column.clone().sum::<f64>() / n;
        let var = column.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        let threshold = 1.0 - spec.bernoulli_p[j];
        for i in 0..spec.n {
            let u = standard_normal_cdf((latent[i * d + j] - mean) / sd);
            values[i * d + j] = usize::from(u > threshold);
        }
    }
    let names = (0..d).map(|j| format!("x{j}")).collect();
    let all = CategoricalDataset::from_flat(values, vec![2; d])?.with_column_names(names)?;
    let train: Vec<usize> = (0..spec.n_train).collect();
    let test: Vec<usize> = (spec.n_train..spec.n).collect();
    Ok((all.select(&train), all.select(&test)))
}
