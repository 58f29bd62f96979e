//! JSON persistence for fitted models.
//!
//! Permutations, domains and base counts are stored as integer arrays, and
//! the base keeps its raw counts and pseudocount instead of probabilities, so
//! save → load → save reproduces the same bytes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::counts::CountMatrix;
use crate::data::EncodingMap;
use crate::density::{DtfModel, FitMetadata, IndependentBase};
use crate::domain::NodeDomain;
use crate::error::{DtfError, Result};
use crate::learn::Criterion;
use crate::perm::IndependentPermutation;
use crate::tsp::{Split, Tsp, TspNode};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRecord {
    format_version: u32,
    cardinalities: Vec<usize>,
    base: BaseRecord,
    tsps: Vec<TspRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fit_metadata: Option<MetadataRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    encoding: Option<EncodingMap>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseRecord {
    pseudocount: f64,
    counts: Vec<Vec<u64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TspRecord {
    max_depth: usize,
    root: NodeRecord,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    node_id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split_feature: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left_values: Option<Vec<usize>>,
    perm: Vec<Vec<usize>>,
    domain: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Box<[NodeRecord; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetadataRecord {
    criterion: String,
    seed: u64,
    max_depth: usize,
    min_samples_split: usize,
    num_tsps: usize,
    trace: Vec<f64>,
}

fn node_record(tree: &Tsp, id: usize) -> NodeRecord {
    let node = tree.node(id);
    NodeRecord {
        node_id: node.node_id,
        split_feature: node.split.as_ref().map(Split::feature),
        left_values: node.split.as_ref().map(|s| s.left_values().to_vec()),
        perm: node.perm.maps().to_vec(),
        domain: node.domain.sets().to_vec(),
        children: node
            .children()
            .map(|(l, r)| Box::new([node_record(tree, l), node_record(tree, r)])),
    }
}

/// Flattens nested records into breadth-first order.
fn tree_from_record(record: TspRecord, cards: &[usize]) -> Result<Tsp> {
    let mut queue = std::collections::VecDeque::new();
    queue.push_back((record.root, 0usize));
    let mut nodes = Vec::new();
    while let Some((rec, depth)) = queue.pop_front() {
        let perm = IndependentPermutation::from_maps(rec.perm)?;
        let mut node = TspNode::leaf(rec.node_id, depth, NodeDomain::from_sets(rec.domain), cards);
        node.perm = perm;
        match (rec.split_feature, rec.left_values, rec.children) {
            (None, None, None) => {}
            (Some(s), Some(v), Some(children)) => {
                let k = *cards.get(s).ok_or_else(|| {
                    DtfError::ModelFormat(format!("node {} splits on a missing feature", rec.node_id))
                })?;
                node.split = Some(Split::new(s, v, k)?);
                let [l, r] = *children;
                node.left = Some(l.node_id);
                node.right = Some(r.node_id);
                queue.push_back((l, depth + 1));
                queue.push_back((r, depth + 1));
            }
            _ => {
                return Err(DtfError::ModelFormat(format!(
                    "node {} must carry split_feature, left_values and children together",
                    rec.node_id
                )))
            }
        }
        nodes.push(node);
    }
    Tsp::from_nodes(nodes, cards.to_vec(), record.max_depth)
}

pub fn model_to_json(model: &DtfModel, encoding: Option<&EncodingMap>) -> String {
    let record = ModelRecord {
        format_version: FORMAT_VERSION,
        cardinalities: model.cardinalities().to_vec(),
        base: BaseRecord {
            pseudocount: model.base().pseudocount(),
            counts: model.base().counts().rows().to_vec(),
        },
        tsps: model
            .tsps()
            .iter()
            .map(|t| TspRecord {
                max_depth: t.max_depth(),
                root: node_record(t, 0),
            })
            .collect(),
        fit_metadata: model.metadata().map(|m| MetadataRecord {
            criterion: m.criterion.as_str().to_owned(),
            seed: m.seed,
            max_depth: m.max_depth,
            min_samples_split: m.min_samples_split,
            num_tsps: m.num_tsps,
            trace: m.trace.clone(),
        }),
        encoding: encoding.cloned(),
    };
    let mut text = serde_json::to_string(&record).expect("model record serializes");
    text.push('\n');
    text
}

pub fn model_from_json(text: &str) -> Result<(DtfModel, Option<EncodingMap>)> {
    // read the version first so newer files get a clear message
    #[derive(Deserialize)]
    struct Version {
        format_version: u32,
    }
    let version: Version =
        serde_json::from_str(text).map_err(|e| DtfError::ModelFormat(e.to_string()))?;
    if version.format_version != FORMAT_VERSION {
        return Err(DtfError::ModelFormat(format!(
            "unsupported format_version {} (this build reads {FORMAT_VERSION})",
            version.format_version
        )));
    }
    let record: ModelRecord =
        serde_json::from_str(text).map_err(|e| DtfError::ModelFormat(e.to_string()))?;
    let cards = record.cardinalities;
    let counts = CountMatrix::from_rows(record.base.counts);
    if counts.cardinalities() != cards {
        return Err(DtfError::ModelFormat("base counts do not match cardinalities".into()));
    }
    let base = IndependentBase::from_counts(counts, record.base.pseudocount)?;
    let tsps = record
        .tsps
        .into_iter()
        .map(|t| tree_from_record(t, &cards))
        .collect::<Result<Vec<_>>>()?;
    let metadata = record
        .fit_metadata
        .map(|m| -> Result<FitMetadata> {
            Ok(FitMetadata {
                criterion: m.criterion.parse::<Criterion>()?,
                seed: m.seed,
                max_depth: m.max_depth,
                min_samples_split: m.min_samples_split,
                num_tsps: m.num_tsps,
                trace: m.trace,
            })
        })
        .transpose()?;
    let model = DtfModel::new(tsps, base, metadata)?;
    Ok((model, record.encoding))
}

pub fn save_model(path: &Path, model: &DtfModel, encoding: Option<&EncodingMap>) -> Result<()> {
    std::fs::write(path, model_to_json(model, encoding))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(DtfModel, Option<EncodingMap>)> {
    model_from_json(&std::fs::read_to_string(path)?)
}
