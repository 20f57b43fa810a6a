//! The multi-modal detector: a dense sensor encoder, a stacked-LSTM network
//! encoder, a fusion network, and a two-class softmax classifier, plus
//! training, checkpointing, and gradient verification.

pub mod checkpoint;
pub mod config;
pub mod forward;
pub mod gradcheck;
pub mod params;
pub mod train;

pub use checkpoint::{
    load_checkpoint, load_checkpoint_expecting, save_checkpoint, Checkpoint, TensorEntry,
};
pub use config::{ModalityMode, TrainConfig};
pub use forward::{
    classify, forward, fuse, network_encode, predict_label, sensor_encode, LatentPair,
};
pub use gradcheck::{run_gradcheck, tiny_config, GradCheckReport, GroupError};
pub use params::ModelParams;
pub use train::{train, train_from};
