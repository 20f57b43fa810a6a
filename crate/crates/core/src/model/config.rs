//! Training configuration and the modality selector.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::OptimizerConfig;

/// Which branches feed the fusion network. Single-modality modes keep the
/// architecture intact but zero the absent branch's latent (its width is
/// preserved) and skip that branch's computation entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModalityMode {
    #[default]
    Multi,
    SensorOnly,
    NetworkOnly,
}

impl ModalityMode {
    pub fn uses_sensor(self) -> bool {
        matches!(self, ModalityMode::Multi | ModalityMode::SensorOnly)
    }

    pub fn uses_network(self) -> bool {
        matches!(self, ModalityMode::Multi | ModalityMode::NetworkOnly)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModalityMode::Multi => "multi",
            ModalityMode::SensorOnly => "sensor-only",
            ModalityMode::NetworkOnly => "network-only",
        }
    }
}

impl fmt::Display for ModalityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Architecture widths and training hyperparameters. Every field has a
/// default, so a JSON `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub sensor_features: usize,
    pub network_features: usize,
    pub sensor_widths: [usize; 4],
    pub lstm_hidden: [usize; 3],
    pub fusion_widths: [usize; 2],
    /// Network rows per sample (the LSTM unroll length).
    pub window: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    pub train_fraction: f64,
    /// Loss weight applied to attack-class samples; 1.0 disables reweighting.
    pub attack_class_weight: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            sensor_features: 51,
            network_features: 16,
            sensor_widths: [64, 48, 32, 16],
            lstm_hidden: [32, 32, 16],
            fusion_widths: [32, 16],
            window: 8,
            epochs: 50,
            batch_size: 64,
            optimizer: OptimizerConfig::default(),
            seed: 0,
            train_fraction: 0.7,
            attack_class_weight: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sensor_features == 0 || self.network_features == 0 {
            return Err(Error::InvalidArgument(
                "both modalities need at least one feature".into(),
            ));
        }
        let widths = self
            .sensor_widths
            .iter()
            .chain(&self.lstm_hidden)
            .chain(&self.fusion_widths);
        if widths.clone().any(|&w| w == 0) {
            return Err(Error::InvalidArgument(
                "all layer widths must be at least 1".into(),
            ));
        }
        if self.window == 0 {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument(
                "batch_size must be at least 1".into(),
            ));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if !(self.attack_class_weight > 0.0 && self.attack_class_weight.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "attack_class_weight must be a positive finite number, got {}",
                self.attack_class_weight
            )));
        }
        self.optimizer.validate()
    }

    /// Width of the sensor branch latent.
    pub fn sensor_latent_dim(&self) -> usize {
        self.sensor_widths[3]
    }

    /// Width of the network branch latent.
    pub fn network_latent_dim(&self) -> usize {
        self.lstm_hidden[2]
    }

    /// Input width of the fusion network (both latents concatenated).
    pub fn fusion_input_dim(&self) -> usize {
        self.sensor_latent_dim() + self.network_latent_dim()
    }

    /// True when two configs describe the same tensor shapes, so a
    /// checkpoint from one can serve the other.
    pub fn same_architecture(&self, other: &TrainConfig) -> bool {
        self.sensor_features == other.sensor_features
            && self.network_features == other.network_features
            && self.sensor_widths == other.sensor_widths
            && self.lstm_hidden == other.lstm_hidden
            && self.fusion_widths == other.fusion_widths
            && self.window == other.window
    }
}
