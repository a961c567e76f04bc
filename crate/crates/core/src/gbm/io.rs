//! JSON model document.
//!
//! ```text
//! {"format_version":1,"schema":[...8 names...],"base_score":r,
//!  "config":{"num_rounds":n,"learning_rate":r,"max_leaves":n,"min_samples_leaf":n,
//!            "l2_lambda":r,"min_split_gain":r,"seed":n},
//!  "trees":[node,...]}
//! node := {"feature":i,"cover":r,"left":node,"right":node} | {"value":r,"cover":r}
//! ```
//!
//! Reals are written with 17 significant digits, so `f64` values round-trip
//! exactly.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use super::{GbmError, Model, Node, TrainConfig, Tree};
use crate::dataset::{Feature, FeatureSchema};
use crate::scalar::{fmt_real, Scalar};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format_version: u32,
    schema: Vec<String>,
    base_score: f64,
    config: ConfigDoc,
    trees: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    num_rounds: usize,
    learning_rate: f64,
    max_leaves: usize,
    min_samples_leaf: usize,
    l2_lambda: f64,
    min_split_gain: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeDoc {
    Split(SplitDoc),
    Leaf(LeafDoc),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitDoc {
    feature: usize,
    cover: f64,
    left: Box<NodeDoc>,
    right: Box<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafDoc {
    value: f64,
    cover: f64,
}

/// Compact JSON with reals at 17 significant digits.
struct RealFormatter;

impl Formatter for RealFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_real(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

fn node_doc<T: Scalar>(tree: &Tree<T>, i: usize) -> NodeDoc {
    match tree.nodes()[i] {
        Node::Split {
            feature,
            left,
            right,
            cover,
        } => NodeDoc::Split(SplitDoc {
            feature: feature.index(),
            cover: cover.as_f64(),
            left: Box::new(node_doc(tree, left)),
            right: Box::new(node_doc(tree, right)),
        }),
        Node::Leaf { value, cover } => NodeDoc::Leaf(LeafDoc {
            value: value.as_f64(),
            cover: cover.as_f64(),
        }),
    }
}

fn flatten<T: Scalar>(doc: &NodeDoc, nodes: &mut Vec<Node<T>>) -> Result<usize, GbmError> {
    let at = nodes.len();
    match doc {
        NodeDoc::Leaf(l) => nodes.push(Node::Leaf {
            value: T::of(l.value),
            cover: T::of(l.cover),
        }),
        NodeDoc::Split(s) => {
            let feature = Feature::from_index(s.feature)
                .ok_or_else(|| GbmError::InvalidTree(format!("feature index {} out of range", s.feature)))?;
            nodes.push(Node::Leaf {
                value: T::zero(),
                cover: T::zero(),
            });
            let left = flatten(&s.left, nodes)?;
            let right = flatten(&s.right, nodes)?;
            nodes[at] = Node::Split {
                feature,
                left,
                right,
                cover: T::of(s.cover),
            };
        }
    }
    Ok(at)
}

/// Writes the model document followed by a newline.
pub fn save_model<T: Scalar, W: Write>(model: &Model<T>, out: W) -> Result<(), GbmError> {
    let cfg = model.config();
    let doc = ModelDoc {
        format_version: FORMAT_VERSION,
        schema: FeatureSchema::NAMES.iter().map(|s| s.to_string()).collect(),
        base_score: model.base_score().as_f64(),
        config: ConfigDoc {
            num_rounds: cfg.num_rounds,
            learning_rate: cfg.learning_rate.as_f64(),
            max_leaves: cfg.max_leaves,
            min_samples_leaf: cfg.min_samples_leaf,
            l2_lambda: cfg.l2_lambda.as_f64(),
            min_split_gain: cfg.min_split_gain.as_f64(),
            seed: cfg.seed,
        },
        trees: model.trees().iter().map(|t| node_doc(t, 0)).collect(),
    };
    let mut out = io::BufWriter::new(out);
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RealFormatter);
    doc.serialize(&mut ser)
        .map_err(|e| GbmError::Malformed(format!("cannot serialize: {e}")))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Reads and validates a model document.
pub fn load_model<T: Scalar, R: Read>(source: R) -> Result<Model<T>, GbmError> {
    let value: serde_json::Value = serde_json::from_reader(source).map_err(|e| GbmError::Malformed(e.to_string()))?;
    match value.get("format_version").map(|v| v.as_i64()) {
        Some(Some(v)) if v == FORMAT_VERSION as i64 => {}
        Some(Some(found)) => {
            return Err(GbmError::VersionMismatch {
                found,
                expected: FORMAT_VERSION,
            })
        }
        _ => return Err(GbmError::Malformed("missing integer `format_version`".into())),
    }
    if let Some(schema) = value.get("schema").and_then(|s| s.as_array()) {
        let names: Vec<&str> = schema.iter().filter_map(|v| v.as_str()).collect();
        if names.len() != schema.len() || !FeatureSchema::matches(&names) {
            return Err(GbmError::SchemaMismatch(format!(
                "model schema {names:?} differs from {:?}",
                FeatureSchema::NAMES
            )));
        }
    }
    let doc: ModelDoc = serde_json::from_value(value).map_err(|e| GbmError::Malformed(e.to_string()))?;

    let c = &doc.config;
    let config = TrainConfig {
        num_rounds: c.num_rounds,
        learning_rate: T::of(c.learning_rate),
        max_leaves: c.max_leaves,
        min_samples_leaf: c.min_samples_leaf,
        l2_lambda: T::of(c.l2_lambda),
        min_split_gain: T::of(c.min_split_gain),
        seed: c.seed,
    };
    config.validate()?;
    let trees = doc
        .trees
        .iter()
        .map(|root| {
            let mut nodes = Vec::new();
            flatten(root, &mut nodes)?;
            Tree::new(nodes)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Model::from_parts(T::of(doc.base_score), trees, config)
}
