//! Mini-batch training loop: shuffle, batch, backprop, optimizer step.

use crate::data::AlignedSample;
use crate::error::{Error, Result};
use crate::model::config::{ModalityMode, TrainConfig};
use crate::model::forward::batch_forward_backward;
use crate::model::params::ModelParams;
use crate::nn::Optimizer;
use crate::rng::SeededRng;

/// Initializes parameters from `config.seed` and trains on `samples`.
/// Returns the trained parameters and the per-epoch mean loss trace.
///
/// A single RNG stream drives both initialization and epoch shuffles, so a
/// given `(config, samples)` pair always produces identical results.
pub fn train(
    config: &TrainConfig,
    mode: ModalityMode,
    samples: &[AlignedSample],
) -> Result<(ModelParams, Vec<f64>)> {
    config.validate()?;
    let mut rng = SeededRng::new(config.seed);
    let params = ModelParams::init(config, &mut rng)?;
    train_with_rng(params, config, mode, samples, &mut rng)
}

/// Continues training from existing parameters (e.g. a loaded checkpoint).
/// The RNG stream starts fresh from `config.seed` and is used only for
/// shuffling, so warm starts are reproducible too.
pub fn train_from(
    params: ModelParams,
    config: &TrainConfig,
    mode: ModalityMode,
    samples: &[AlignedSample],
) -> Result<(ModelParams, Vec<f64>)> {
    config.validate()?;
    let mut rng = SeededRng::new(config.seed);
    train_with_rng(params, config, mode, samples, &mut rng)
}

fn train_with_rng(
    mut params: ModelParams,
    config: &TrainConfig,
    mode: ModalityMode,
    samples: &[AlignedSample],
    rng: &mut SeededRng,
) -> Result<(ModelParams, Vec<f64>)> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("training samples"));
    }
    for sample in samples {
        check_sample(config, sample)?;
    }

    let mut optimizer = Optimizer::new(config.optimizer)?;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut trace = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        let mut seen = 0usize;
        for (batch_index, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<&AlignedSample> = chunk.iter().map(|&i| &samples[i]).collect();
            let loss =
                batch_forward_backward(&mut params, &batch, mode, config.attack_class_weight);
            if !loss.is_finite() {
                return Err(Error::NanLoss {
                    epoch,
                    batch: batch_index,
                });
            }
            let mut tensors = params.tensors_mut();
            let mut grads: Vec<_> = tensors.iter_mut().map(|(_, t)| &mut **t).collect();
            optimizer.step(&mut grads);
            epoch_loss += loss * chunk.len() as f64;
            seen += chunk.len();
        }
        trace.push(epoch_loss / seen as f64);
    }
    Ok((params, trace))
}

fn check_sample(config: &TrainConfig, sample: &AlignedSample) -> Result<()> {
    if sample.sensor.len() != config.sensor_features {
        return Err(Error::ShapeMismatch {
            context: "training sample".into(),
            expected: format!("{} sensor features", config.sensor_features),
            got: format!("{} sensor features", sample.sensor.len()),
        });
    }
    if sample.network.shape() != (config.window, config.network_features) {
        return Err(Error::ShapeMismatch {
            context: "training sample".into(),
            expected: format!(
                "network window of {} rows x {} features",
                config.window, config.network_features
            ),
            got: format!(
                "network window of {} rows x {} features",
                sample.network.rows(),
                sample.network.cols()
            ),
        });
    }
    if sample.label > 1 {
        return Err(Error::InvalidArgument(format!(
            "labels must be 0 or 1, found {}",
            sample.label
        )));
    }
    Ok(())
}
