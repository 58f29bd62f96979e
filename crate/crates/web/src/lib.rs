//! Browser demo: fit a flow to the eight-Gaussian grid and explore the copula
//! generator. Each exported function has a plain Rust counterpart so the
//! logic can be tested natively.

use dtf_core::data::{gen_copula, gen_eight_gaussian, CopulaSpec, EightGaussianSpec};
use dtf_core::oracle::ConfigSpace;
use dtf_core::{fit_dtf, CategoricalDataset, Criterion, DtfError, DtfModel, FitConfig};
use wasm_bindgen::prelude::*;

fn js(e: DtfError) -> JsError {
    JsError::new(&e.to_string())
}

fn glp(num_tsps: u32, max_depth: u32, seed: u32) -> FitConfig {
    FitConfig {
        max_depth: max_depth as usize,
        min_samples_split: 2,
        criterion: Criterion::Glp,
        seed: seed.into(),
        num_tsps: num_tsps as usize,
    }
}

fn flatten(data: &CategoricalDataset) -> Vec<u32> {
    data.values().iter().map(|&v| v as u32).collect()
}

/// A model fitted to the binned eight-Gaussian mixture.
#[wasm_bindgen]
pub struct EightGaussianDemo {
    model: DtfModel,
    train: CategoricalDataset,
    test: CategoricalDataset,
    bins: usize,
}

impl EightGaussianDemo {
    pub fn fit(num_tsps: u32, max_depth: u32, seed: u32) -> Result<Self, DtfError> {
        let spec = EightGaussianSpec {
            seed: seed.into(),
            ..Default::default()
        };
        let (train, test) = gen_eight_gaussian(&spec)?;
        let model = fit_dtf(&train, &glp(num_tsps, max_depth, seed), 1.0)?.model;
        Ok(Self {
            model,
            train,
            test,
            bins: spec.bins,
        })
    }

    /// Probability of every grid cell, row-major with the first feature as row.
    pub fn density(&self) -> Result<Vec<f64>, DtfError> {
        ConfigSpace::new(self.model.cardinalities())
            .enumerate()?
            .iter()
            .map(|x| self.model.log_likelihood(x).map(f64::exp))
            .collect()
    }
}

#[wasm_bindgen]
impl EightGaussianDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(num_tsps: u32, max_depth: u32, seed: u32) -> Result<EightGaussianDemo, JsError> {
        Self::fit(num_tsps, max_depth, seed).map_err(js)
    }

    pub fn bins(&self) -> u32 {
        self.bins as u32
    }

    #[wasm_bindgen(js_name = densityGrid)]
    pub fn density_grid(&self) -> Result<Vec<f64>, JsError> {
        self.density().map_err(js)
    }

    /// Training points as flat `[x0, y0, x1, y1, …]` bin indices.
    #[wasm_bindgen(js_name = trainPoints)]
    pub fn train_points(&self) -> Vec<u32> {
        flatten(&self.train)
    }

    /// Fresh draws as flat bin indices.
    pub fn sample(&self, count: u32, seed: u32) -> Result<Vec<u32>, JsError> {
        self.model
            .sample(count as usize, seed.into())
            .map(|d| flatten(&d))
            .map_err(js)
    }

    /// Image of a cell under the full flow: where the base distribution sees it.
    pub fn forward(&self, x: u32, y: u32) -> Result<Vec<u32>, JsError> {
        self.model
            .forward(&[x as usize, y as usize])
            .map(|z| z.into_iter().map(|v| v as u32).collect())
            .map_err(js)
    }

    #[wasm_bindgen(js_name = trainNll)]
    pub fn train_nll(&self) -> Result<f64, JsError> {
        self.model.nll(&self.train).map(|s| s.mean()).map_err(js)
    }

    #[wasm_bindgen(js_name = testNll)]
    pub fn test_nll(&self) -> Result<f64, JsError> {
        self.model.nll(&self.test).map(|s| s.mean()).map_err(js)
    }

    pub fn parameters(&self) -> u32 {
        self.model.parameter_count() as u32
    }
}

/// `[independent-model test NLL, flow test NLL]` on a four-feature copula
/// sample at the given total correlation.
pub fn copula_comparison(
    total_correlation: f64,
    num_tsps: u32,
    max_depth: u32,
    seed: u32,
) -> Result<Vec<f64>, DtfError> {
    let spec = CopulaSpec {
        target_total_correlation: total_correlation,
        seed: seed.into(),
        ..Default::default()
    };
    let (train, test) = gen_copula(&spec)?;
    let independent = fit_dtf(&train, &glp(0, 0, seed), 1.0)?.model;
    let flow = fit_dtf(&train, &glp(num_tsps, max_depth, seed), 1.0)?.model;
    Ok(vec![
        independent.nll(&test)?.mean(),
        flow.nll(&test)?.mean(),
    ])
}

#[wasm_bindgen(js_name = copulaComparison)]
pub fn copula_comparison_js(
    total_correlation: f64,
    num_tsps: u32,
    max_depth: u32,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    copula_comparison(total_correlation, num_tsps, max_depth, seed).map_err(js)
}
