//! Independent (feature-wise) permutations and their algebra.

use crate::counts::CountMatrix;
use crate::error::{DtfError, Result};

/// A product of `d` one-dimensional permutations, `π(x) = [π_0(x_0), …]`.
///
/// Stored as dense lookup rows: `maps[j][a] = π_j(a)`. The inverse rows are
/// kept alongside so both directions are table lookups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentPermutation {
    maps: Vec<Vec<usize>>,
    inverse: Vec<Vec<usize>>,
}

fn invert_row(row: &[usize], feature: usize) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; row.len()];
    for (a, &b) in row.iter().enumerate() {
        if b >= row.len() || inv[b] != usize::MAX {
            return Err(DtfError::NotAPermutation {
                feature,
                len: row.len(),
            });
        }
        inv[b] = a;
    }
    Ok(inv)
}

impl IndependentPermutation {
    pub fn identity(cardinalities: &[usize]) -> Self {
        let maps: Vec<Vec<usize>> = cardinalities.iter().map(|&k| (0..k).collect()).collect();
        Self {
            inverse: maps.clone(),
            maps,
        }
    }

    /// Validates that every row is a bijection of `0..k_j`.
    pub fn from_maps(maps: Vec<Vec<usize>>) -> Result<Self> {
        let inverse = maps
            .iter()
            .enumerate()
            .map(|(j, row)| invert_row(row, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { maps, inverse })
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn map(&self, j: usize) -> &[usize] {
        &self.maps[j]
    }

    pub fn n_features(&self) -> usize {
        self.maps.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.maps.iter().map(Vec::len).collect()
    }

    #[inline]
    pub fn apply_value(&self, j: usize, a: usize) -> usize {
        self.maps[j][a]
    }

    #[inline]
    pub fn apply_inverse_value(&self, j: usize, a: usize) -> usize {
        self.inverse[j][a]
    }

    pub fn is_identity(&self) -> bool {
        self.maps
            .iter()
            .all(|row| row.iter().enumerate().all(|(a, &b)| a == b))
    }

    /// Number of entries with `π_j(a) != a`, summed over features.
    pub fn moved_entries(&self) -> usize {
        self.maps
            .iter()
            .map(|row| row.iter().enumerate().filter(|(a, &b)| *a != b).count())
            .sum()
    }

    fn check_width(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.maps.len() {
            return Err(DtfError::DimensionMismatch {
                expected: self.maps.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &[usize]) -> Result<Vec<usize>> {
        self.check_width(x)?;
        crate::dataset::CategoricalDataset::check_config(&self.cardinalities(), x)?;
        Ok(x.iter().enumerate().map(|(j, &a)| self.maps[j][a]).collect())
    }

    pub fn apply_inverse(&self, x: &[usize]) -> Result<Vec<usize>> {
        self.check_width(x)?;
        crate::dataset::CategoricalDataset::check_config(&self.cardinalities(), x)?;
        Ok(x.iter()
            .enumerate()
            .map(|(j, &a)| self.inverse[j][a])
            .collect())
    }

    /// Unchecked in-place application; `x` must already be in range.
    #[inline]
    pub fn apply_in_place(&self, x: &mut [usize]) {
        for (j, a) in x.iter_mut().enumerate() {
            *a = self.maps[j][*a];
        }
    }

    #[inline]
    pub fn apply_inverse_in_place(&self, x: &mut [usize]) {
        for (j, a) in x.iter_mut().enumerate() {
            *a = self.inverse[j][*a];
        }
    }

    /// `outer ∘ inner`: apply `inner` first, then `outer`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.cardinalities() != inner.cardinalities() {
            return Err(DtfError::InvalidArgument(
                "cannot compose permutations over different cardinalities".into(),
            ));
        }
        let maps: Vec<Vec<usize>> = outer
            .maps
            .iter()
            .zip(&inner.maps)
            .map(|(o, i)| i.iter().map(|&b| o[b]).collect())
            .collect();
        let inverse = outer
            .inverse
            .iter()
            .zip(&inner.inverse)
            .map(|(oi, ii)| oi.iter().map(|&b| ii[b]).collect())
            .collect();
        Ok(Self { maps, inverse })
    }

    /// `self ∘ other`.
    pub fn then_after(&self, other: &Self) -> Self {
        Self::compose(self, other).expect("matching cardinalities")
    }

    pub fn inverse(&self) -> Self {
        Self {
            maps: self.inverse.clone(),
            inverse: self.maps.clone(),
        }
    }

    /// `π[c]`: moves counts along with their categories, so that
    /// `result(j, π_j(a)) = c(j, a)`.
    pub fn permute_counts(&self, c: &CountMatrix) -> Result<CountMatrix> {
        if c.cardinalities() != self.cardinalities() {
            return Err(DtfError::InvalidArgument(
                "count matrix shape does not match the permutation".into(),
            ));
        }
        let rows = self
            .inverse
            .iter()
            .zip(c.rows())
            .map(|(inv, row)| inv.iter().map(|&a| row[a]).collect())
            .collect();
        Ok(CountMatrix::from_rows(rows))
    }

    /// Image of a set of values of feature `j`, sorted.
    pub fn image_of(&self, j: usize, values: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = values.iter().map(|&a| self.maps[j][a]).collect();
        out.sort_unstable();
        out
    }
}
