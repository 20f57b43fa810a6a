//! Gradient-descent parameter updates: plain SGD and Adam.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::ParamTensor;

/// Optimizer family and hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OptimizerConfig {
    Sgd {
        lr: f64,
    },
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
    },
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig::Adam {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let lr = match self {
            OptimizerConfig::Sgd { lr } => *lr,
            OptimizerConfig::Adam {
                lr,
                beta1,
                beta2,
                eps,
            } => {
                if !(0.0..1.0).contains(beta1) || !(0.0..1.0).contains(beta2) {
                    return Err(Error::InvalidArgument(
                        "adam betas must lie in [0, 1)".into(),
                    ));
                }
                if *eps <= 0.0 {
                    return Err(Error::InvalidArgument("adam eps must be positive".into()));
                }
                *lr
            }
        };
        if !lr.is_finite() || lr <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {lr}"
            )));
        }
        Ok(())
    }
}

/// Applies updates from accumulated gradients. Adam keeps first and second
/// moment estimates per tensor, addressed by position in the parameter list,
/// so every `step` call must pass the tensors in the same order.
#[derive(Debug, Clone)]
pub struct Optimizer {
    config: OptimizerConfig,
    steps: u64,
    moments: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Optimizer {
            config,
            steps: 0,
            moments: Vec::new(),
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    /// One update over every tensor, consuming the gradients accumulated
    /// since the last `zero_grad`.
    pub fn step(&mut self, params: &mut [&mut ParamTensor]) {
        if self.moments.is_empty() {
            self.moments = params
                .iter()
                .map(|p| (vec![0.0; p.len()], vec![0.0; p.len()]))
                .collect();
        }
        assert_eq!(
            self.moments.len(),
            params.len(),
            "optimizer step: parameter list changed size"
        );
        self.steps += 1;
        match self.config {
            OptimizerConfig::Sgd { lr } => {
                for p in params.iter_mut() {
                    let grads = p.grad.as_slice().to_vec();
                    for (v, g) in p.value.as_mut_slice().iter_mut().zip(&grads) {
                        *v -= lr * g;
                    }
                }
            }
            OptimizerConfig::Adam {
                lr,
                beta1,
                beta2,
                eps,
            } => {
                let bc1 = 1.0 - beta1.powi(self.steps as i32);
                let bc2 = 1.0 - beta2.powi(self.steps as i32);
                for (p, (m, v)) in params.iter_mut().zip(&mut self.moments) {
                    assert_eq!(p.len(), m.len(), "optimizer step: tensor changed shape");
                    let grads = p.grad.as_slice().to_vec();
                    for ((val, g), (mi, vi)) in p
                        .value
                        .as_mut_slice()
                        .iter_mut()
                        .zip(&grads)
                        .zip(m.iter_mut().zip(v.iter_mut()))
                    {
                        *mi = beta1 * *mi + (1.0 - beta1) * g;
                        *vi = beta2 * *vi + (1.0 - beta2) * g * g;
                        let m_hat = *mi / bc1;
                        let v_hat = *vi / bc2;
                        *val -= lr * m_hat / (v_hat.sqrt() + eps);
                    }
                }
            }
        }
    }
}
