//! Layer primitives, activations, loss, optimizers, and a finite-difference
//! gradient oracle.

pub mod activation;
pub mod dense;
pub mod gradcheck;
pub mod loss;
pub mod lstm;
pub mod optim;

pub use activation::{relu, softmax, Activation};
pub use dense::{dense_forward, DenseLayer};
pub use gradcheck::{finite_difference_gradient, max_relative_error, relative_error};
pub use loss::bce_loss;
pub use lstm::{lstm_cell_step, LstmCellParams};
pub use optim::{Optimizer, OptimizerConfig};
