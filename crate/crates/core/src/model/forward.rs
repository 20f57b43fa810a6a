//! Forward passes through the architecture, prediction, and the matching
//! backward pass used by training.

use crate::data::AlignedSample;
use crate::error::{Error, Result};
use crate::model::config::ModalityMode;
use crate::model::params::ModelParams;
use crate::nn::activation::Activation;
use crate::nn::dense::DenseCache;
use crate::nn::loss::BCE_EPS;
use crate::nn::lstm::LstmStepCache;
use crate::nn::softmax;
use crate::tensor::Matrix;

/// Intermediate representations of one sample: the sensor latent, the
/// network latent, and the fused joint representation.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentPair {
    pub sensor: Vec<f64>,
    pub network: Vec<f64>,
    pub joint: Vec<f64>,
}

/// Four chained dense+ReLU layers over the sensor feature vector.
pub fn sensor_encode(params: &ModelParams, x_s: &[f64]) -> Result<Vec<f64>> {
    if x_s.len() != params.sensor_input_dim() {
        return Err(Error::ShapeMismatch {
            context: "sensor_encode".into(),
            expected: format!("{} sensor features", params.sensor_input_dim()),
            got: format!("{} sensor features", x_s.len()),
        });
    }
    let mut h = x_s.to_vec();
    for layer in &params.sensor_layers {
        h = layer.forward(&h, Activation::Relu);
    }
    Ok(h)
}

/// Runs the stacked LSTM over the window rows (oldest first). The first two
/// layers pass their full output sequences upward; the last layer's
/// final-step hidden state is the network latent.
pub fn network_encode(params: &ModelParams, x_n: &Matrix) -> Result<Vec<f64>> {
    if x_n.rows() == 0 {
        return Err(Error::EmptyInput("network window"));
    }
    if x_n.cols() != params.network_input_dim() {
        return Err(Error::ShapeMismatch {
            context: "network_encode".into(),
            expected: format!("{} network features", params.network_input_dim()),
            got: format!("{} network features", x_n.cols()),
        });
    }
    let mut sequence: Vec<Vec<f64>> = (0..x_n.rows()).map(|t| x_n.row(t).to_vec()).collect();
    for cell in &params.lstm_layers {
        let hidden = cell.hidden_size();
        let mut h = vec![0.0; hidden];
        let mut c = vec![0.0; hidden];
        let mut outputs = Vec::with_capacity(sequence.len());
        for x_t in &sequence {
            let (h_next, c_next, _) = cell.step_cached(x_t, &h, &c);
            h = h_next;
            c = c_next;
            outputs.push(h.clone());
        }
        sequence = outputs;
    }
    Ok(sequence.pop().expect("window has at least one row"))
}

/// Concatenates the two latents and applies the two fusion layers.
pub fn fuse(params: &ModelParams, h_s: &[f64], o_n: &[f64]) -> Result<Vec<f64>> {
    if h_s.len() != params.sensor_latent_dim() || o_n.len() != params.network_latent_dim() {
        return Err(Error::ShapeMismatch {
            context: "fuse".into(),
            expected: format!(
                "latents of length {} and {}",
                params.sensor_latent_dim(),
                params.network_latent_dim()
            ),
            got: format!("latents of length {} and {}", h_s.len(), o_n.len()),
        });
    }
    let mut h: Vec<f64> = h_s.iter().chain(o_n).copied().collect();
    for layer in &params.fusion_layers {
        h = layer.forward(&h, Activation::Relu);
    }
    Ok(h)
}

/// Softmax over the classifier logits: `(p_normal, p_attack)`.
pub fn classify(params: &ModelParams, h: &[f64]) -> Result<[f64; 2]> {
    if h.len() != params.classifier.input_size() {
        return Err(Error::ShapeMismatch {
            context: "classify".into(),
            expected: format!(
                "joint representation of length {}",
                params.classifier.input_size()
            ),
            got: format!("length {}", h.len()),
        });
    }
    let logits = params.classifier.forward(h, Activation::None);
    let probs = softmax(&logits)?;
    Ok([probs[0], probs[1]])
}

/// Full pass over one sample. Inactive branches (per `mode`) are skipped and
/// their latent slot is zero-filled, preserving the fusion input width.
pub fn forward(
    params: &ModelParams,
    sample: &AlignedSample,
    mode: ModalityMode,
) -> Result<(LatentPair, [f64; 2])> {
    let sensor = if mode.uses_sensor() {
        sensor_encode(params, &sample.sensor)?
    } else {
        vec![0.0; params.sensor_latent_dim()]
    };
    let network = if mode.uses_network() {
        network_encode(params, &sample.network)?
    } else {
        vec![0.0; params.network_latent_dim()]
    };
    let joint = fuse(params, &sensor, &network)?;
    let probs = classify(params, &joint)?;
    Ok((
        LatentPair {
            sensor,
            network,
            joint,
        },
        probs,
    ))
}

/// Argmax over the probability pair; an exact tie counts as normal (0).
pub fn predict_label(probabilities: [f64; 2]) -> u8 {
    u8::from(probabilities[1] > probabilities[0])
}

/// Everything the backward pass needs from one sample's forward pass.
pub(crate) struct ForwardCache {
    sensor_caches: Vec<DenseCache>,
    lstm_caches: Vec<Vec<LstmStepCache>>,
    fusion_caches: Vec<DenseCache>,
    classifier_cache: DenseCache,
    pub probs: [f64; 2],
}

/// Unchecked forward pass that retains per-layer caches. Numerically
/// identical to [`forward`]; shape errors here are programmer errors.
pub(crate) fn forward_cached(
    params: &ModelParams,
    sample: &AlignedSample,
    mode: ModalityMode,
) -> ForwardCache {
    let mut sensor_caches = Vec::with_capacity(params.sensor_layers.len());
    let sensor_latent = if mode.uses_sensor() {
        let mut h = sample.sensor.clone();
        for layer in &params.sensor_layers {
            let (out, cache) = layer.forward_cached(&h, Activation::Relu);
            sensor_caches.push(cache);
            h = out;
        }
        h
    } else {
        vec![0.0; params.sensor_latent_dim()]
    };

    let mut lstm_caches = Vec::with_capacity(params.lstm_layers.len());
    let network_latent = if mode.uses_network() {
        let x_n = &sample.network;
        let mut sequence: Vec<Vec<f64>> = (0..x_n.rows()).map(|t| x_n.row(t).to_vec()).collect();
        for cell in &params.lstm_layers {
            let hidden = cell.hidden_size();
            let mut h = vec![0.0; hidden];
            let mut c = vec![0.0; hidden];
            let mut outputs = Vec::with_capacity(sequence.len());
            let mut caches = Vec::with_capacity(sequence.len());
            for x_t in &sequence {
                let (h_next, c_next, cache) = cell.step_cached(x_t, &h, &c);
                h = h_next;
                c = c_next;
                outputs.push(h.clone());
                caches.push(cache);
            }
            lstm_caches.push(caches);
            sequence = outputs;
        }
        sequence.pop().expect("window has at least one row")
    } else {
        vec![0.0; params.network_latent_dim()]
    };

    let mut joint: Vec<f64> = sensor_latent
        .iter()
        .chain(&network_latent)
        .copied()
        .collect();
    let mut fusion_caches = Vec::with_capacity(params.fusion_layers.len());
    for layer in &params.fusion_layers {
        let (out, cache) = layer.forward_cached(&joint, Activation::Relu);
        fusion_caches.push(cache);
        joint = out;
    }

    let (logits, classifier_cache) = params.classifier.forward_cached(&joint, Activation::None);
    let max = logits[0].max(logits[1]);
    let e0 = (logits[0] - max).exp();
    let e1 = (logits[1] - max).exp();
    let sum = e0 + e1;

    ForwardCache {
        sensor_caches,
        lstm_caches,
        fusion_caches,
        classifier_cache,
        probs: [e0 / sum, e1 / sum],
    }
}

/// Backpropagates a loss gradient on the logits through the whole model,
/// accumulating into every active tensor's `grad`.
pub(crate) fn backward_from_logits(
    params: &mut ModelParams,
    cache: &ForwardCache,
    d_logits: &[f64; 2],
    mode: ModalityMode,
) {
    let d_joint = params
        .classifier
        .backward(&cache.classifier_cache, d_logits, Activation::None);

    let mut d = d_joint;
    for (layer, layer_cache) in params
        .fusion_layers
        .iter_mut()
        .zip(&cache.fusion_caches)
        .rev()
    {
        d = layer.backward(layer_cache, &d, Activation::Relu);
    }

    let sensor_dim = params.sensor_layers[3].output_size();
    let (d_sensor_latent, d_network_latent) = d.split_at(sensor_dim);

    if mode.uses_sensor() {
        let mut d = d_sensor_latent.to_vec();
        for (layer, layer_cache) in params
            .sensor_layers
            .iter_mut()
            .zip(&cache.sensor_caches)
            .rev()
        {
            d = layer.backward(layer_cache, &d, Activation::Relu);
        }
    }

    if mode.uses_network() {
        let steps = cache.lstm_caches[0].len();
        // The loss reaches the top layer only through its final step; the
        // gradient then flows backward through time and down the stack.
        let mut d_outputs: Vec<Vec<f64>> = Vec::new();
        for (li, cell) in params.lstm_layers.iter_mut().enumerate().rev() {
            let hidden = cell.hidden_size();
            let caches = &cache.lstm_caches[li];
            let mut d_h = vec![0.0; hidden];
            let mut d_c = vec![0.0; hidden];
            let mut d_inputs = vec![Vec::new(); steps];
            for t in (0..steps).rev() {
                if li == cache.lstm_caches.len() - 1 {
                    if t == steps - 1 {
                        for (dh, dl) in d_h.iter_mut().zip(d_network_latent) {
                            *dh += dl;
                        }
                    }
                } else {
                    for (dh, dl) in d_h.iter_mut().zip(&d_outputs[t]) {
                        *dh += dl;
                    }
                }
                let (d_x, d_h_prev, d_c_prev) = cell.step_backward(&caches[t], &d_h, &d_c);
                d_inputs[t] = d_x;
                d_h = d_h_prev;
                d_c = d_c_prev;
            }
            d_outputs = d_inputs;
        }
    }
}

/// Zeroes the gradients, then runs forward and backward over the batch.
/// Returns the mean (optionally class-weighted) binary cross entropy.
pub(crate) fn batch_forward_backward(
    params: &mut ModelParams,
    batch: &[&AlignedSample],
    mode: ModalityMode,
    attack_weight: f64,
) -> f64 {
    params.zero_grads();
    let m = batch.len() as f64;
    let mut loss = 0.0;
    for sample in batch {
        let cache = forward_cached(params, sample, mode);
        let weight = if sample.label == 1 {
            attack_weight
        } else {
            1.0
        };
        loss += weight * sample_bce(cache.probs[1], sample.label);
        let target = [f64::from(sample.label == 0), f64::from(sample.label == 1)];
        let d_logits = [
            weight * (cache.probs[0] - target[0]) / m,
            weight * (cache.probs[1] - target[1]) / m,
        ];
        backward_from_logits(params, &cache, &d_logits, mode);
    }
    loss / m
}

/// Forward-only batch loss, summed in the same order as
/// [`batch_forward_backward`] so the two agree bitwise.
pub(crate) fn batch_loss(
    params: &ModelParams,
    batch: &[&AlignedSample],
    mode: ModalityMode,
    attack_weight: f64,
) -> f64 {
    let m = batch.len() as f64;
    let mut loss = 0.0;
    for sample in batch {
        let cache = forward_cached(params, sample, mode);
        let weight = if sample.label == 1 {
            attack_weight
        } else {
            1.0
        };
        loss += weight * sample_bce(cache.probs[1], sample.label);
    }
    loss / m
}

fn sample_bce(p_attack: f64, label: u8) -> f64 {
    let p = p_attack.clamp(BCE_EPS, 1.0 - BCE_EPS);
    if label == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}
