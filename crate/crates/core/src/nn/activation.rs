//! Elementwise activations and the stable softmax.

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Activation applied after an affine layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    None,
}

impl Activation {
    /// `f64::max` would turn NaN into 0 here and silently launder a
    /// numerically corrupted forward pass; NaN must pass through so a
    /// divergent run surfaces as a non-finite loss.
    #[inline]
    pub(crate) fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => {
                if v > 0.0 || v.is_nan() {
                    v
                } else {
                    0.0
                }
            }
            Activation::None => v,
        }
    }

    /// Derivative with respect to the pre-activation value.
    #[inline]
    pub(crate) fn derivative(self, pre: f64) -> f64 {
        match self {
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::None => 1.0,
        }
    }
}

/// Elementwise `max(0, x)`, except that NaN passes through; shape preserved.
pub fn relu(x: &Matrix) -> Matrix {
    let mut out = x.clone();
    for v in out.as_mut_slice() {
        *v = Activation::Relu.apply(*v);
    }
    out
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Softmax over at least two logits, computed with max-subtraction so large
/// magnitudes cannot overflow. Outputs are positive and sum to 1.
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "softmax needs at least 2 logits, got {}",
            logits.len()
        )));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::NonFinite("softmax logits".into()));
    }
    let exps: Vec<f64> = logits.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / sum).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relu_matches_definition() {
        let x = Matrix::from_vec(1, 3, vec![-3.0, 0.0, 2.0]).unwrap();
        assert_eq!(relu(&x).as_slice(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn relu_all_negative_is_zero() {
        let x = Matrix::from_vec(2, 2, vec![-1.0, -0.5, -3.0, -0.01]).unwrap();
        assert!(relu(&x).as_slice().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn relu_nonnegative_is_identity() {
        let x = Matrix::from_vec(2, 2, vec![0.0, 0.5, 3.0, 1e6]).unwrap();
        assert_eq!(relu(&x), x);
    }

    #[test]
    fn relu_is_idempotent() {
        let x = Matrix::from_vec(1, 4, vec![-2.0, -0.1, 0.3, 7.0]).unwrap();
        let once = relu(&x);
        assert_eq!(relu(&once), once);
    }

    #[test]
    fn relu_propagates_nan_and_infinity() {
        assert!(Activation::Relu.apply(f64::NAN).is_nan());
        assert_eq!(Activation::Relu.apply(f64::INFINITY), f64::INFINITY);
        assert_eq!(Activation::Relu.apply(f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn softmax_symmetric_pair() {
        let p = softmax(&[0.0, 0.0]).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn softmax_analytic_pair() {
        let p = softmax(&[2.0f64.ln(), 0.0]).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn softmax_is_overflow_safe() {
        let p = softmax(&[1000.0, 0.0]).unwrap();
        assert!(p.iter().all(|v| v.is_finite()));
        assert!(p[0] > 1.0 - 1e-12);
        assert!(p[1] < 1e-12);
    }

    #[test]
    fn softmax_rejects_short_input() {
        assert!(softmax(&[]).is_err());
        assert!(softmax(&[1.0]).is_err());
    }

    #[test]
    fn sigmoid_midpoint() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
    }
}
