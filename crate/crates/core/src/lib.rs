//! Discrete tree flows: invertible tree-structured permutations over
//! categorical data, with exact likelihoods and exact sampling.

pub mod counts;
pub mod data;
pub mod dataset;
pub mod density;
pub mod domain;
pub mod error;
pub mod learn;
pub mod model_file;
pub mod oracle;
pub mod perm;
pub mod space;
pub mod tsp;

pub use counts::CountMatrix;
pub use dataset::CategoricalDataset;
pub use domain::NodeDomain;
pub use error::{DtfError, Result};
pub use perm::IndependentPermutation;
pub use space::ConfigSpace;
pub use tsp::{Split, Tsp, TspNode};
pub use density::{fit_base, fit_dtf, DtfFit, DtfModel, IndependentBase};
pub use learn::{fit_tsp, Criterion, FitConfig};
