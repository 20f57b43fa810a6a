//! The model's learnable state: construction, seeded initialization, and
//! flat views used by the optimizer and the gradient checker.

use crate::error::Result;
use crate::model::config::TrainConfig;
use crate::nn::{DenseLayer, LstmCellParams};
use crate::rng::SeededRng;
use crate::tensor::{Matrix, ParamTensor};

/// All learnable tensors: four sensor layers, three stacked LSTM cells, two
/// fusion layers, and the two-logit classifier head.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub sensor_layers: Vec<DenseLayer>,
    pub lstm_layers: Vec<LstmCellParams>,
    pub fusion_layers: Vec<DenseLayer>,
    pub classifier: DenseLayer,
}

/// Which initialization scale a weight matrix gets. Rectified layers keep
/// their activation variance only with the larger fan-in-based bound; halving
/// it per layer (as the balanced bound does) shrinks a deep ReLU stack until
/// whole layers go dark and stop learning.
#[derive(Clone, Copy)]
enum WeightKind {
    /// Feeds a ReLU: uniform in `±sqrt(6 / fan_in)`.
    Rectified,
    /// Feeds a saturating or linear output: uniform in
    /// `±sqrt(6 / (fan_in + fan_out))`.
    Balanced,
}

fn uniform_weights(kind: WeightKind, rows: usize, cols: usize, rng: &mut SeededRng) -> Matrix {
    let bound = match kind {
        WeightKind::Rectified => (6.0 / cols as f64).sqrt(),
        WeightKind::Balanced => (6.0 / (rows + cols) as f64).sqrt(),
    };
    let data = (0..rows * cols)
        .map(|_| rng.uniform(-bound, bound))
        .collect();
    Matrix::from_vec(rows, cols, data).expect("bounded uniform draws are finite")
}

impl ModelParams {
    /// Builds the model with every tensor zero-filled.
    pub fn zeros(config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        Self::build(
            config,
            |_, rows, cols, _| Matrix::zeros(rows, cols),
            &mut SeededRng::new(0),
        )
    }

    /// Seeded initialization, drawn row-major in tensor order: ReLU-facing
    /// weights (sensor encoder, fusion) uniform in `±sqrt(6/fan_in)`, gate
    /// and classifier weights uniform in `±sqrt(6/(fan_in+fan_out))`, biases
    /// zero except the LSTM forget gates which start at 1.
    pub fn init(config: &TrainConfig, rng: &mut SeededRng) -> Result<Self> {
        config.validate()?;
        let mut model = Self::build(config, uniform_weights, rng)?;
        for cell in &mut model.lstm_layers {
            let hidden = cell.hidden_size();
            let biases = cell.biases.value.as_mut_slice();
            for b in &mut biases[hidden..2 * hidden] {
                *b = 1.0;
            }
        }
        Ok(model)
    }

    /// [`ModelParams::init`] with a fresh RNG from `config.seed`.
    pub fn init_seeded(config: &TrainConfig) -> Result<Self> {
        Self::init(config, &mut SeededRng::new(config.seed))
    }

    fn build(
        config: &TrainConfig,
        mut weight: impl FnMut(WeightKind, usize, usize, &mut SeededRng) -> Matrix,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        let mut sensor_layers = Vec::with_capacity(4);
        let mut input = config.sensor_features;
        for &width in &config.sensor_widths {
            sensor_layers.push(DenseLayer::new(
                weight(WeightKind::Rectified, width, input, rng),
                Matrix::zeros(width, 1),
            )?);
            input = width;
        }

        let mut lstm_layers = Vec::with_capacity(3);
        let mut input = config.network_features;
        for &hidden in &config.lstm_hidden {
            lstm_layers.push(LstmCellParams::new(
                weight(WeightKind::Balanced, 4 * hidden, input, rng),
                weight(WeightKind::Balanced, 4 * hidden, hidden, rng),
                Matrix::zeros(4 * hidden, 1),
            )?);
            input = hidden;
        }

        let mut fusion_layers = Vec::with_capacity(2);
        let mut input = config.fusion_input_dim();
        for &width in &config.fusion_widths {
            fusion_layers.push(DenseLayer::new(
                weight(WeightKind::Rectified, width, input, rng),
                Matrix::zeros(width, 1),
            )?);
            input = width;
        }

        let classifier = DenseLayer::new(
            weight(WeightKind::Balanced, 2, input, rng),
            Matrix::zeros(2, 1),
        )?;
        Ok(ModelParams {
            sensor_layers,
            lstm_layers,
            fusion_layers,
            classifier,
        })
    }

    pub fn sensor_input_dim(&self) -> usize {
        self.sensor_layers[0].input_size()
    }

    pub fn network_input_dim(&self) -> usize {
        self.lstm_layers[0].input_size()
    }

    pub fn sensor_latent_dim(&self) -> usize {
        self.sensor_layers[3].output_size()
    }

    pub fn network_latent_dim(&self) -> usize {
        self.lstm_layers[2].hidden_size()
    }

    /// All tensors with their stable names, in a fixed order shared by
    /// initialization, checkpoints, the optimizer, and the gradient checker.
    pub fn tensors(&self) -> Vec<(String, &ParamTensor)> {
        let mut out = Vec::with_capacity(23);
        for (i, layer) in self.sensor_layers.iter().enumerate() {
            out.push((format!("sensor.{i}.weight"), &layer.weight));
            out.push((format!("sensor.{i}.bias"), &layer.bias));
        }
        for (i, cell) in self.lstm_layers.iter().enumerate() {
            out.push((format!("lstm.{i}.input_weights"), &cell.input_weights));
            out.push((
                format!("lstm.{i}.recurrent_weights"),
                &cell.recurrent_weights,
            ));
            out.push((format!("lstm.{i}.biases"), &cell.biases));
        }
        for (i, layer) in self.fusion_layers.iter().enumerate() {
            out.push((format!("fusion.{i}.weight"), &layer.weight));
            out.push((format!("fusion.{i}.bias"), &layer.bias));
        }
        out.push(("classifier.weight".to_string(), &self.classifier.weight));
        out.push(("classifier.bias".to_string(), &self.classifier.bias));
        out
    }

    /// Mutable counterpart of [`ModelParams::tensors`], same order.
    pub fn tensors_mut(&mut self) -> Vec<(String, &mut ParamTensor)> {
        let mut out = Vec::with_capacity(23);
        for (i, layer) in self.sensor_layers.iter_mut().enumerate() {
            out.push((format!("sensor.{i}.weight"), &mut layer.weight));
            out.push((format!("sensor.{i}.bias"), &mut layer.bias));
        }
        for (i, cell) in self.lstm_layers.iter_mut().enumerate() {
            out.push((format!("lstm.{i}.input_weights"), &mut cell.input_weights));
            out.push((
                format!("lstm.{i}.recurrent_weights"),
                &mut cell.recurrent_weights,
            ));
            out.push((format!("lstm.{i}.biases"), &mut cell.biases));
        }
        for (i, layer) in self.fusion_layers.iter_mut().enumerate() {
            out.push((format!("fusion.{i}.weight"), &mut layer.weight));
            out.push((format!("fusion.{i}.bias"), &mut layer.bias));
        }
        out.push(("classifier.weight".to_string(), &mut self.classifier.weight));
        out.push(("classifier.bias".to_string(), &mut self.classifier.bias));
        out
    }

    pub fn zero_grads(&mut self) {
        for (_, tensor) in self.tensors_mut() {
            tensor.zero_grad();
        }
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    /// All values concatenated in tensor order, row-major within each tensor.
    pub fn flatten_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (_, tensor) in self.tensors() {
            out.extend_from_slice(tensor.value.as_slice());
        }
        out
    }

    /// All gradients concatenated in the same layout as `flatten_values`.
    pub fn flatten_grads(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (_, tensor) in self.tensors() {
            out.extend_from_slice(tensor.grad.as_slice());
        }
        out
    }

    /// Overwrites all values from a flat slice in `flatten_values` layout.
    pub fn set_values(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for (_, tensor) in self.tensors_mut() {
            let len = tensor.len();
            tensor
                .value
                .as_mut_slice()
                .copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        assert_eq!(offset, flat.len(), "flat parameter slice has wrong length");
    }
}
