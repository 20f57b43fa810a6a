//! Multi-modal cyber-attack detection for industrial control systems.
//!
//! An ICS produces two very different data streams: slowly sampled sensor and
//! actuator readings, and a much denser stream of network traffic records.
//! This crate pairs each sensor snapshot with the window of network records
//! that preceded it, encodes the two modalities separately (a dense
//! feed-forward encoder for sensors, a stacked LSTM for the network window),
//! fuses the latents, and classifies each sample as normal or attack.
//!
//! Everything is plain `f64` and deterministic: given the same seed, data, and
//! configuration, training produces bitwise-identical checkpoints, loss
//! traces, and evaluation reports.
//!
//! Module map:
//!
//! - [`tensor`], [`rng`], [`nn`]: dense row-major matrices, the seeded RNG,
//!   and the layer/loss/optimizer primitives with their gradient math.
//! - [`data`]: CSV ingestion, mean imputation, min-max normalization,
//!   modality alignment, chronological splitting, and a synthetic generator
//!   for when the real plant data is out of reach.
//! - [`model`]: the two-branch architecture, its training loop, and JSON
//!   checkpoints.
//! - [`eval`]: confusion matrix, precision/recall/F1, and report emission.
//! - [`experiment`]: end-to-end orchestration (prepare, train, evaluate,
//!   single-modality ablations).

pub mod data;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod model;
pub mod nn;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
