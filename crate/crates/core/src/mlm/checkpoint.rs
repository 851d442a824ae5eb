//! Model checkpoints as one JSON document.
//!
//! ```text
//! { "format": "ptr-tiny-mlm", "version": 1,
//!   "config": { d_model, n_layers, n_heads, d_ff, max_len, init_std, layer_norm_eps },
//!   "classes": [..], "learnable": n, "vocab": [..reserved.., ..entries..],
//!   "tensors": [ { "name": "tok_emb", "shape": [rows, cols], "data": [row-major f64] }, .. ] }
//! ```
//!
//! Floats are written in shortest round-trip form, so a save/load cycle is
//! bit-exact. Tensor order follows [`Params::tensors`].

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::ModelConfig;
use super::model::TinyMlm;
use super::params::Params;
use super::vocab::Vocab;

pub const CHECKPOINT_FORMAT: &str = "ptr-tiny-mlm";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed checkpoint: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported checkpoint: {0}")]
    Format(String),
}

#[derive(Serialize, Deserialize)]
struct TensorDoc {
    name: String,
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointDoc {
    format: String,
    version: u32,
    config: ModelConfig,
    classes: Vec<String>,
    learnable: usize,
    vocab: Vec<String>,
    tensors: Vec<TensorDoc>,
}

pub fn to_json(model: &TinyMlm) -> String {
    let shapes = model.params.shapes();
    let tensors = model
        .params
        .tensors()
        .into_iter()
        .zip(shapes)
        .map(|((name, data), info)| TensorDoc {
            name,
            shape: info.shape,
            data: data.to_vec(),
        })
        .collect();
    let doc = CheckpointDoc {
        format: CHECKPOINT_FORMAT.into(),
        version: CHECKPOINT_VERSION,
        config: model.config.clone(),
        classes: model.classes.clone(),
        learnable: model.n_learnable(),
        vocab: model.vocab.entries().to_vec(),
        tensors,
    };
    let mut s = serde_json::to_string(&doc).expect("checkpoint serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<TinyMlm, CheckpointError> {
    let doc: CheckpointDoc = serde_json::from_str(text)?;
    if doc.format != CHECKPOINT_FORMAT || doc.version != CHECKPOINT_VERSION {
        return Err(CheckpointError::Format(format!(
            "{} v{}",
            doc.format, doc.version
        )));
    }
    doc.config.check().map_err(CheckpointError::Format)?;
    let vocab = Vocab::from_list(doc.vocab)
        .ok_or_else(|| CheckpointError::Format("vocabulary is malformed".into()))?;
    let mut params = Params::zeros(&doc.config, vocab.len(), doc.classes.len(), doc.learnable);
    let expected = params.shapes();
    if expected.len() != doc.tensors.len() {
        return Err(CheckpointError::Format(format!(
            "expected {} tensors, found {}",
            expected.len(),
            doc.tensors.len()
        )));
    }
    for ((info, (_, dst)), t) in expected
        .iter()
        .zip(params.tensors_mut())
        .zip(&doc.tensors)
    {
        if info.name != t.name || info.shape != t.shape || dst.len() != t.data.len() {
            return Err(CheckpointError::Format(format!(
                "tensor `{}` {:?} does not match expected `{}` {:?}",
                t.name, t.shape, info.name, info.shape
            )));
        }
        dst.copy_from_slice(&t.data);
    }
    if !params.all_finite() {
        return Err(CheckpointError::Format("non-finite parameter".into()));
    }
    Ok(TinyMlm {
        config: doc.config,
        vocab,
        classes: doc.classes,
        params,
    })
}

pub fn save(model: &TinyMlm, path: &Path) -> Result<(), CheckpointError> {
    std::fs::write(path, to_json(model)).map_err(|source| CheckpointError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load(path: &Path) -> Result<TinyMlm, CheckpointError> {
    let text = std::fs::read_to_string(path).map_err(|source| CheckpointError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_json(&text)
}
