use crate::counts::CountMatrix;
use crate::error::{DtfError, Result};

/// An `n × d` matrix of category indices with per-feature cardinalities.
///
/// Values are stored row-major. Every cell satisfies
/// `values[i][j] < cardinalities[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalDataset {
    values: Vec<usize>,
    n_rows: usize,
    cardinalities: Vec<usize>,
    column_names: Option<Vec<String>>,
}

impl CategoricalDataset {
    pub fn new(rows: Vec<Vec<usize>>, cardinalities: Vec<usize>) -> Result<Self> {
        let d = cardinalities.len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for row in &rows {
            if row.len() != d {
                return Err(DtfError::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(values, cardinalities)
    }

    /// Builds a dataset from row-major values.
    pub fn from_flat(values: Vec<usize>, cardinalities: Vec<usize>) -> Result<Self> {
        let d = cardinalities.len();
        if d == 0 {
            return Err(DtfError::InvalidArgument(
                "a dataset needs at least one feature".into(),
            ));
        }
        if let Some(j) = cardinalities.iter().position(|&k| k == 0) {
            return Err(DtfError::InvalidArgument(format!(
                "feature {j} has zero categories"
            )));
        }
        if !values.len().is_multiple_of(d) {
            return Err(DtfError::DimensionMismatch {
                expected: d,
                got: values.len() % d,
            });
        }
        for (idx, &v) in values.iter().enumerate() {
            let j = idx % d;
            if v >= cardinalities[j] {
                return Err(DtfError::ValueOutOfRange {
                    feature: j,
                    value: v,
                    cardinality: cardinalities[j],
                });
            }
        }
        Ok(Self {
            n_rows: values.len() / d,
            values,
            cardinalities,
            column_names: None,
        })
    }

    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(DtfError::DimensionMismatch {
                expected: self.n_features(),
                got: names.len(),
            });
        }
        self.column_names = Some(names);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn row(&self, i: usize) -> &[usize] {
        let d = self.n_features();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.values.chunks_exact(self.n_features())
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Checks that a configuration has the right width and in-range values.
    pub fn check_config(cardinalities: &[usize], x: &[usize]) -> Result<()> {
        if x.len() != cardinalities.len() {
            return Err(DtfError::DimensionMismatch {
                expected: cardinalities.len(),
                got: x.len(),
            });
        }
        for (j, (&v, &k)) in x.iter().zip(cardinalities).enumerate() {
            if v >= k {
                return Err(DtfError::ValueOutOfRange {
                    feature: j,
                    value: v,
                    cardinality: k,
                });
            }
        }
        Ok(())
    }

    /// Returns a new dataset holding the listed rows, in order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let d = self.n_features();
        let mut values = Vec::with_capacity(indices.len() * d);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self {
            n_rows: indices.len(),
            values,
            cardinalities: self.cardinalities.clone(),
            column_names: self.column_names.clone(),
        }
    }

    /// Applies `f` to every row, producing a dataset with the same shape.
    pub fn map_rows<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&[usize]) -> Vec<usize>,
    {
        let mut values = Vec::with_capacity(self.values.len());
        for row in self.rows() {
            let out = f(row);
            debug_assert_eq!(out.len(), row.len());
            values.extend_from_slice(&out);
        }
        Self {
            n_rows: self.n_rows,
            values,
            cardinalities: self.cardinalities.clone(),
            column_names: self.column_names.clone(),
        }
    }

    /// Per-feature category counts over all rows.
    pub fn counts(&self) -> CountMatrix {
        let mut c = CountMatrix::zeros(&self.cardinalities);
        for row in self.rows() {
            c.add_config(row);
        }
        c
    }

    /// Per-feature counts over a subset of rows.
    pub fn counts_of(&self, indices: &[usize]) -> CountMatrix {
        let mut c = CountMatrix::zeros(&self.cardinalities);
        for &i in indices {
            c.add_config(self.row(i));
        }
        c
    }

    /// Sum of per-feature empirical entropies in nats (mean NLL per row of
    /// the maximum-likelihood independent model).
    pub fn marginal_entropy(&self) -> f64 {
        if self.n_rows == 0 {
            return 0.0;
        }
        self.counts().nll() / self.n_rows as f64
    }
}
