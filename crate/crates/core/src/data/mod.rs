//! Dataset ingestion and synthetic generators.

mod copula;
mod csv_io;
mod eight_gaussian;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::CategoricalDataset;
use crate::error::{DtfError, Result};

pub use copula::{copula_total_correlation, gen_copula, solve_gap, CopulaLevel, CopulaSpec};
pub use csv_io::{
    load_csv, load_csv_with_encoding, read_schema, schema_path, write_csv, write_schema,
    ColumnEncoding, EncodingMap, Schema,
};
pub use eight_gaussian::{gen_eight_gaussian, EightGaussianSpec};

/// Seeded shuffle, then the first `round(fraction · n)` rows go to train.
pub fn split_train_test(
    data: &CategoricalDataset,
    fraction: f64,
    seed: u64,
) -> Result<(CategoricalDataset, CategoricalDataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(DtfError::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let n = data.n_rows();
    let n_train = (fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(DtfError::InvalidArgument(format!(
            "{n} rows are too few to split at {fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok((data.select(&order[..n_train]), data.select(&order[n_train..])))
}
