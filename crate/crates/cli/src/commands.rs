use std::path::Path;

use dtf_core::data::{
    gen_copula, gen_eight_gaussian, load_csv, load_csv_with_encoding, read_schema, write_csv,
    write_schema, CopulaSpec, EightGaussianSpec, EncodingMap, Schema,
};
use dtf_core::learn::check_rank_consistency;
use dtf_core::model_file::{load_model, save_model};
use dtf_core::{fit_dtf, CategoricalDataset, DtfError, DtfModel, FitConfig};

use crate::{CheckArgs, Dataset, EvalArgs, FitArgs, GenArgs, SampleArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Audit(String),
    #[error(transparent)]
    Core(#[from] DtfError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Audit(_) | CliError::Core(DtfError::GuardExceeded { .. }) => 3,
            CliError::Core(_) => 1,
        }
    }
}

type CliResult = Result<(), CliError>;

fn write_split(path: &Path, data: &CategoricalDataset) -> CliResult {
    write_csv(path, data, None)?;
    let schema = Schema {
        cardinalities: Some(data.cardinalities().to_vec()),
        has_header: Some(true),
    };
    write_schema(path, &schema)?;
    Ok(())
}

pub fn gen(args: GenArgs) -> CliResult {
    let (train, test) = match args.dataset {
        Dataset::EightGauss => {
            if args.tc.is_some() || args.p.is_some() {
                return Err(CliError::Usage(
                    "--tc and --p only apply to --dataset copula".into(),
                ));
            }
            let mut spec = EightGaussianSpec {
                seed: args.seed,
                ..Default::default()
            };
            if let Some(n) = args.n {
                spec.n = n;
                spec.n_train = n * 4 / 5;
            }
            gen_eight_gaussian(&spec)?
        }
        Dataset::Copula => {
            let mut spec = CopulaSpec {
                seed: args.seed,
                ..Default::default()
            };
            if let Some(tc) = args.tc {
                spec.target_total_correlation = tc;
            }
            if let Some(p) = args.p {
                spec.d = p.len();
                spec.bernoulli_p = p;
            }
            if let Some(n) = args.n {
                spec.n = n;
                spec.n_train = n * 4 / 5;
            }
            gen_copula(&spec)?
        }
    };
    write_split(&args.out_train, &train)?;
    write_split(&args.out_test, &test)?;
    println!(
        "n_train={} n_test={} d={} k={:?}",
        train.n_rows(),
        test.n_rows(),
        train.n_features(),
        train.cardinalities()
    );
    Ok(())
}

pub fn fit(args: FitArgs) -> CliResult {
    let schema = read_schema(&args.train)?;
    let (train, encoding) = load_csv(&args.train, schema.as_ref())?;
    let cfg = FitConfig {
        max_depth: args.max_depth,
        min_samples_split: args.min_split,
        criterion: args.criterion.into(),
        seed: args.seed,
        num_tsps: args.num_tsps,
    };
    let fitted = fit_dtf(&train, &cfg, args.pseudocount)?;
    let model = fitted.model;
    println!(
        "train: {} rows, {} features, k={:?}",
        train.n_rows(),
        train.n_features(),
        train.cardinalities()
    );
    if let Some(meta) = model.metadata() {
        for (stage, nll) in meta.trace.iter().enumerate() {
            println!("stage {stage}: unsmoothed train NLL {nll:.4} nats");
        }
    }
    let summary = model.nll(&train)?;
    println!(
        "train NLL (pseudocount {}): {:.4} nats",
        args.pseudocount,
        summary.mean()
    );
    println!("parameters: {}", model.parameter_count());
    save_model(&args.model, &model, Some(&encoding))?;
    Ok(())
}

/// Loads a data file in the model's encoding; files written by `gen` carry a
/// sidecar that settles the header question.
fn load_for_model(
    path: &Path,
    model: &DtfModel,
    encoding: Option<&EncodingMap>,
) -> Result<CategoricalDataset, CliError> {
    let fallback = EncodingMap::integer(model.cardinalities().len());
    let encoding = encoding.unwrap_or(&fallback);
    let has_header = read_schema(path)?.and_then(|s| s.has_header);
    Ok(load_csv_with_encoding(
        path,
        encoding,
        model.cardinalities(),
        has_header,
    )?)
}

/// Refuses models whose trees are not bijections, since their likelihoods
/// and samples would be meaningless.
fn require_invertible(model: &DtfModel) -> CliResult {
    for (i, t) in model.tsps().iter().enumerate() {
        if let Some(bad) = t.check_invertibility().failures().next() {
            return Err(CliError::Audit(format!(
                "tree {i} is not invertible (first failing node {}); run `dtf check` for details",
                bad.node_id
            )));
        }
    }
    Ok(())
}

pub fn eval(args: EvalArgs) -> CliResult {
    let (model, encoding) = load_model(&args.model)?;
    require_invertible(&model)?;
    let data = load_for_model(&args.data, &model, encoding.as_ref())?;
    let (scale, unit) = if args.bits {
        (1.0 / std::f64::consts::LN_2, "bits")
    } else {
        (1.0, "nats")
    };
    let summary = model.nll(&data)?;
    let mut lines = vec![format!(
        "mean NLL: {:.4} {unit} over {} rows",
        summary.mean() * scale,
        summary.n_rows
    )];
    if summary.n_infinite > 0 {
        lines.push(format!(
            "zero-likelihood rows: {} (mean over the other {}: {:.4} {unit})",
            summary.n_infinite,
            summary.n_rows - summary.n_infinite,
            summary.mean_finite * scale
        ));
    }
    if args.per_row {
        println!("row,nll");
        for (i, v) in model.nll_per_row(&data)?.into_iter().enumerate() {
            println!("{i},{:.4}", v * scale);
        }
        for l in lines {
            eprintln!("{l}");
        }
    } else {
        for l in lines {
            println!("{l}");
        }
    }
    Ok(())
}

pub fn sample(args: SampleArgs) -> CliResult {
    let (model, encoding) = load_model(&args.model)?;
    require_invertible(&model)?;
    let probs = model.base().probs();
    if let Some(j) = probs.iter().position(|row| row.iter().all(|&p| p == 0.0)) {
        return Err(CliError::Core(DtfError::InvalidArgument(format!(
            "base feature {j} has no probability mass, so nothing can be drawn; refit with a positive --pseudocount"
        ))));
    }
    let rows = model.sample(args.n, args.seed)?;
    write_csv(&args.out, &rows, encoding.as_ref())?;
    println!("wrote {} rows to {}", rows.n_rows(), args.out.display());
    Ok(())
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn check(args: CheckArgs) -> CliResult {
    let (model, encoding) = match load_model(&args.model) {
        Ok(m) => m,
        Err(e @ (DtfError::NotAPermutation { .. } | DtfError::InvalidTree(_))) => {
            println!("model does not describe valid trees: {e}");
            return Err(CliError::Audit("invertibility audit failed".into()));
        }
        Err(e) => return Err(e.into()),
    };
    let mut stage_data = match &args.data {
        Some(path) => Some(load_for_model(path, &model, encoding.as_ref())?),
        None => None,
    };
    println!("tree  nodes  depth  domains  bijection  rank");
    let mut all_ok = true;
    for (i, t) in model.tsps().iter().enumerate() {
        let report = t.check_invertibility();
        let domains_ok = report.passed();
        all_ok &= domains_ok;
        let bijection = if args.exhaustive {
            let ok = t.check_bijection_exhaustive()?;
            all_ok &= ok;
            mark(ok)
        } else {
            "-"
        };
        let rank = match stage_data.take() {
            Some(data) => {
                let ok = check_rank_consistency(t, &data)?;
                all_ok &= ok;
                stage_data = Some(t.transform(&data)?);
                mark(ok)
            }
            None => "-",
        };
        println!(
            "{i:>4}  {:>5}  {:>5}  {:>7}  {bijection:>9}  {rank:>4}",
            t.n_nodes(),
            t.nodes().iter().map(|n| n.depth).max().unwrap_or(0),
            mark(domains_ok),
        );
        for bad in report.failures() {
            let features: Vec<usize> = bad
                .feature_ok
                .iter()
                .enumerate()
                .filter(|(_, ok)| !**ok)
                .map(|(j, _)| j)
                .collect();
            println!(
                "      node {}: permutation leaves domain on features {features:?}, split ok={}, domain matches={}",
                bad.node_id, bad.split_ok, bad.domain_matches
            );
        }
    }
    if model.tsps().is_empty() {
        println!("(no trees; base only)");
    }
    if all_ok {
        println!("all checks passed");
        Ok(())
    } else {
        Err(CliError::Audit("audit failed".into()))
    }
}
