//! Versioned JSON checkpoints.
//!
//! ```json
//! {"version": 1, "kind": "piad-srnn", "config": {...}, "normalizer": {...},
//!  "params": {"W_dSS": {"shape": [64, 64], "data": [...]}, ...}}
//! ```
//!
//! Floats are written in shortest round-trip form and parsed with correct
//! rounding, so every parameter survives a save/load cycle bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::registry::{AnyModel, ModelKind};
use super::ModelConfig;
use crate::dataio::Normalizer;
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedArray {
    pub shape: [usize; 2],
    pub data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct VersionProbe {
    version: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointDoc {
    pub version: u32,
    pub kind: ModelKind,
    pub config: ModelConfig,
    #[serde(default)]
    pub normalizer: Option<Normalizer>,
    pub params: BTreeMap<String, NamedArray>,
}

/// A restored model and the normaliser it was trained with.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub model: AnyModel,
    pub normalizer: Option<Normalizer>,
}

pub fn to_document(model: &AnyModel, normalizer: Option<&Normalizer>) -> CheckpointDoc {
    let params = model
        .params()
        .into_iter()
        .map(|p| {
            (
                p.name.to_string(),
                NamedArray {
                    shape: [p.shape.0, p.shape.1],
                    data: p.data.to_vec(),
                },
            )
        })
        .collect();
    CheckpointDoc {
        version: CHECKPOINT_VERSION,
        kind: model.kind(),
        config: model.config().clone(),
        normalizer: normalizer.cloned(),
        params,
    }
}

pub fn to_json(model: &AnyModel, normalizer: Option<&Normalizer>) -> String {
    serde_json::to_string_pretty(&to_document(model, normalizer)).expect("checkpoint serialises")
}

pub fn save_checkpoint(model: &AnyModel, normalizer: Option<&Normalizer>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(model, normalizer))?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    from_json(&text).map_err(|e| match e {
        Error::Parse { msg, .. } => Error::Parse {
            path: path.to_path_buf(),
            msg,
        },
        other => other,
    })
}

pub fn from_json(text: &str) -> Result<Checkpoint> {
    let parse_err = |e: serde_json::Error| Error::Parse {
        path: "<checkpoint>".into(),
        msg: e.to_string(),
    };
    let probe: VersionProbe = serde_json::from_str(text).map_err(parse_err)?;
    if probe.version != CHECKPOINT_VERSION {
        return Err(Error::CheckpointVersion {
            found: probe.version,
            expected: CHECKPOINT_VERSION,
        });
    }
    let doc: CheckpointDoc = serde_json::from_str(text).map_err(parse_err)?;
    from_document(doc)
}

pub fn from_document(mut doc: CheckpointDoc) -> Result<Checkpoint> {
    let mut model = AnyModel::init(doc.kind, doc.config.clone())?;
    for p in model.params_mut() {
        let arr = doc.params.remove(p.name).ok_or_else(|| Error::CheckpointShape {
            name: p.name.into(),
            msg: "missing".into(),
        })?;
        let want = [p.shape.0, p.shape.1];
        if arr.shape != want || arr.data.len() != p.data.len() {
            return Err(Error::CheckpointShape {
                name: p.name.into(),
                msg: format!(
                    "shape {:?} with {} values, expected {:?}",
                    arr.shape,
                    arr.data.len(),
                    want
                ),
            });
        }
        p.data.copy_from_slice(&arr.data);
    }
    if let Some(extra) = doc.params.keys().next() {
        return Err(Error::CheckpointShape {
            name: extra.clone(),
            msg: format!("not a parameter of {:?}", doc.kind),
        });
    }
    Ok(Checkpoint {
        model,
        normalizer: doc.normalizer,
    })
}
