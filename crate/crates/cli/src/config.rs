//! The run configuration: one JSON document drives every subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fuseids_core::data::SyntheticSpec;
use fuseids_core::model::{ModalityMode, TrainConfig};

use crate::CliError;

/// CSV inputs for one run. When absent, commands fall back to generating the
/// dataset described by the `synthetic` section in memory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    pub sensor: PathBuf,
    pub network: PathBuf,
}

/// Settings for the gradient verification command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradcheckConfig {
    pub seeds: Vec<u64>,
    pub eps: f64,
    pub tolerance: f64,
}

impl Default for GradcheckConfig {
    fn default() -> Self {
        GradcheckConfig {
            seeds: (0..5).collect(),
            eps: 1e-5,
            tolerance: 1e-4,
        }
    }
}

/// Everything a run needs. Every field has a default, so `{}` is a valid
/// configuration; unknown keys are rejected up front.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub modality: ModalityMode,
    /// CSV inputs; omit to use the synthetic generator instead.
    pub data: Option<DataPaths>,
    pub synthetic: SyntheticSpec,
    /// Checkpoint to evaluate (required by `eval`).
    pub checkpoint: Option<PathBuf>,
    /// Saved preprocessing statistics (required by `eval`).
    pub stats: Option<PathBuf>,
    pub gradcheck: GradcheckConfig,
}

impl RunConfig {
    /// Reads and fully validates a configuration; nothing is written anywhere
    /// until this succeeds.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.train.validate().map_err(CliError::Core)?;
        self.synthetic.validate().map_err(CliError::Core)?;
        if self.gradcheck.seeds.is_empty() {
            return Err(CliError::Config("gradcheck.seeds must not be empty".into()));
        }
        if !(self.gradcheck.eps > 0.0 && self.gradcheck.eps.is_finite()) {
            return Err(CliError::Config(format!(
                "gradcheck.eps must be a positive finite number, got {}",
                self.gradcheck.eps
            )));
        }
        if !(self.gradcheck.tolerance > 0.0 && self.gradcheck.tolerance.is_finite()) {
            return Err(CliError::Config(format!(
                "gradcheck.tolerance must be a positive finite number, got {}",
                self.gradcheck.tolerance
            )));
        }
        Ok(())
    }

    /// Applies a `--seed` override to both the trainer and the generator, so
    /// one flag reseeds the whole run.
    pub fn override_seed(&mut self, seed: Option<u64>) {
        if let Some(seed) = seed {
            self.train.seed = seed;
            self.synthetic.seed = seed;
        }
    }
}
