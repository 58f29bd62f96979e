use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{DtfError, Result};

/// Per-feature, per-category counts `c(j, a)`.
///
/// Row `j` has length `k_j`; entries for `a >= k_j` are structural zeros and
/// read back as `0` through [`CountMatrix::get`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountMatrix {
    rows: Vec<Vec<u64>>,
}

impl CountMatrix {
    pub fn zeros(cardinalities: &[usize]) -> Self {
        Self {
            rows: cardinalities.iter().map(|&k| vec![0; k]).collect(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Self {
        Self { rows }
    }

    pub fn n_features(&self) -> usize {
        self.rows.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn row(&self, j: usize) -> &[u64] {
        &self.rows[j]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn get(&self, j: usize, a: usize) -> u64 {
        self.rows[j].get(a).copied().unwrap_or(0)
    }

    pub fn set(&mut self, j: usize, a: usize, value: u64) {
        self.rows[j][a] = value;
    }

    pub fn add_config(&mut self, x: &[usize]) {
        for (row, &a) in self.rows.iter_mut().zip(x) {
            row[a] += 1;
        }
    }

    /// Total count of feature `j`.
    pub fn row_total(&self, j: usize) -> u64 {
        self.rows[j].iter().sum()
    }

    /// Empirical negative log-likelihood of the whole matrix in nats, summed
    /// over samples: `Σ_j Σ_a −c(j,a) ln(c(j,a) / n_j)`.
    pub fn nll(&self) -> f64 {
        self.rows.iter().map(|r| row_nll(r)).sum()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.cardinalities() != other.cardinalities() {
            return Err(DtfError::InvalidArgument(
                "count matrices have different shapes".into(),
            ));
        }
        Ok(self + other)
    }
}

impl Add for &CountMatrix {
    type Output = CountMatrix;

    fn add(self, other: &CountMatrix) -> CountMatrix {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        CountMatrix { rows }
    }
}

/// `Σ_a −c_a ln(c_a / Σc)` for one count vector; zero for an empty vector.
///
/// Terms are summed in ascending count order, so relabeling the categories
/// gives a bit-identical result.
pub fn row_nll(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let mut sorted: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    sorted.sort_unstable();
    sorted
        .into_iter()
        .map(|c| {
            let c = c as f64;
            -c * (c / n).ln()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_nll_of_uniform_pair() {
        let v = row_nll(&[5, 5]);
        assert!((v - 10.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(row_nll(&[0, 7, 0]), 0.0);
        assert_eq!(row_nll(&[0, 0]), 0.0);
    }

    #[test]
    fn relabeling_is_bit_identical() {
        assert_eq!(row_nll(&[3, 7, 1, 9]).to_bits(), row_nll(&[9, 1, 0, 7, 3]).to_bits());
    }

    #[test]
    fn structural_zeros_read_as_zero() {
        let c = CountMatrix::zeros(&[2, 4]);
        assert_eq!(c.get(0, 3), 0);
        assert_eq!(c.cardinalities(), vec![2, 4]);
    }

    #[test]
    fn add_rejects_shape_mismatch() {
        let a = CountMatrix::zeros(&[2, 3]);
        let b = CountMatrix::zeros(&[3, 2]);
        assert!(a.checked_add(&b).is_err());
    }
}
