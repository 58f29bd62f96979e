use crate::error::{DtfError, Result};

/// Upper bound on the number of configurations any exhaustive routine will visit.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;

/// The full configuration space `∏_j {0,…,k_j−1}`, enumerated
/// lexicographically with the last feature varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigSpace {
    cardinalities: Vec<usize>,
}

impl ConfigSpace {
    pub fn new(cardinalities: &[usize]) -> Self {
        Self {
            cardinalities: cardinalities.to_vec(),
        }
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    /// Number of configurations, saturating instead of overflowing.
    pub fn size(&self) -> u128 {
        self.cardinalities
            .iter()
            .fold(1u128, |acc, &k| acc.saturating_mul(k as u128))
    }

    pub fn check_guard(&self, limit: u128) -> Result<usize> {
        let size = self.size();
        if size > limit {
            return Err(DtfError::GuardExceeded { size, limit });
        }
        Ok(size as usize)
    }

    /// Mixed-radix index of `x` in enumeration order.
    pub fn index_of(&self, x: &[usize]) -> usize {
        x.iter()
            .zip(&self.cardinalities)
            .fold(0usize, |acc, (&a, &k)| acc * k + a)
    }

    pub fn config_at(&self, mut index: usize) -> Vec<usize> {
        let mut x = vec![0; self.cardinalities.len()];
        for (slot, &k) in x.iter_mut().zip(&self.cardinalities).rev() {
            *slot = index % k;
            index /= k;
        }
        x
    }

    /// All configurations, after checking the size against [`EXHAUSTIVE_LIMIT`].
    pub fn enumerate(&self) -> Result<Vec<Vec<usize>>> {
        let size = self.check_guard(EXHAUSTIVE_LIMIT)?;
        Ok((0..size).map(|i| self.config_at(i)).collect())
    }
}
