//! Versioned JSON checkpoints: the full configuration, the modality the
//! model was trained under, and every parameter tensor by name.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::config::{ModalityMode, TrainConfig};
use crate::model::params::ModelParams;
use crate::tensor::Matrix;

pub const FORMAT_VERSION: u32 = 1;

/// One named tensor: `[rows, cols]` plus row-major values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub shape: [usize; 2],
    pub values: Vec<f64>,
}

/// On-disk model snapshot. Tensors are kept in a sorted map so the JSON is
/// stable and two identical models serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format_version: u32,
    pub config: TrainConfig,
    pub modality: ModalityMode,
    pub tensors: BTreeMap<String, TensorEntry>,
}

impl Checkpoint {
    pub fn from_params(config: &TrainConfig, modality: ModalityMode, params: &ModelParams) -> Self {
        let tensors = params
            .tensors()
            .into_iter()
            .map(|(name, tensor)| {
                let entry = TensorEntry {
                    shape: [tensor.value.rows(), tensor.value.cols()],
                    values: tensor.value.as_slice().to_vec(),
                };
                (name, entry)
            })
            .collect();
        Checkpoint {
            format_version: FORMAT_VERSION,
            config: config.clone(),
            modality,
            tensors,
        }
    }

    /// Rebuilds the parameters, verifying that exactly the expected tensors
    /// are present with the shapes implied by the stored configuration.
    pub fn to_params(&self) -> Result<ModelParams> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::CheckpointVersion {
                expected: FORMAT_VERSION,
                found: self.format_version,
            });
        }
        let mut params = ModelParams::zeros(&self.config)?;
        let mut remaining = self.tensors.clone();
        for (name, tensor) in params.tensors_mut() {
            let entry = remaining
                .remove(&name)
                .ok_or_else(|| Error::CheckpointMismatch(format!("missing tensor {name}")))?;
            let expected = [tensor.value.rows(), tensor.value.cols()];
            if entry.shape != expected {
                return Err(Error::CheckpointMismatch(format!(
                    "tensor {name} has shape {:?}, configuration implies {expected:?}",
                    entry.shape
                )));
            }
            if entry.values.len() != expected[0] * expected[1] {
                return Err(Error::CheckpointMismatch(format!(
                    "tensor {name} holds {} values, shape {expected:?} needs {}",
                    entry.values.len(),
                    expected[0] * expected[1]
                )));
            }
            tensor.value = Matrix::from_vec(expected[0], expected[1], entry.values)?;
        }
        if let Some(name) = remaining.into_keys().next() {
            return Err(Error::CheckpointMismatch(format!(
                "unexpected tensor {name}"
            )));
        }
        Ok(params)
    }
}

pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer(BufWriter::new(file), checkpoint).map_err(|e| Error::json(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let checkpoint: Checkpoint =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::json(path, e))?;
    if checkpoint.format_version != FORMAT_VERSION {
        return Err(Error::CheckpointVersion {
            expected: FORMAT_VERSION,
            found: checkpoint.format_version,
        });
    }
    Ok(checkpoint)
}

/// Loads a checkpoint and rejects it unless its architecture (feature
/// counts, layer widths, window) matches `expected`.
pub fn load_checkpoint_expecting(path: &Path, expected: &TrainConfig) -> Result<Checkpoint> {
    let checkpoint = load_checkpoint(path)?;
    if !checkpoint.config.same_architecture(expected) {
        return Err(Error::CheckpointMismatch(
            "checkpoint architecture does not match the requested configuration".into(),
        ));
    }
    Ok(checkpoint)
}
