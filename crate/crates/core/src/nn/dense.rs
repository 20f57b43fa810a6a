//! Fully connected layers on column vectors: `activation(W x + b)`.

use crate::error::{Error, Result};
use crate::nn::activation::Activation;
use crate::tensor::{Matrix, ParamTensor};

/// One affine layer with its learnable weight and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weight: ParamTensor,
    pub bias: ParamTensor,
}

/// Forward state needed to backpropagate through one dense layer.
#[derive(Debug, Clone)]
pub(crate) struct DenseCache {
    pub input: Vec<f64>,
    pub pre: Vec<f64>,
}

impl DenseLayer {
    pub fn new(weight: Matrix, bias: Matrix) -> Result<Self> {
        if bias.rows() != weight.rows() || bias.cols() != 1 {
            return Err(Error::ShapeMismatch {
                context: "DenseLayer::new".into(),
                expected: format!("bias {}x1", weight.rows()),
                got: format!("bias {}x{}", bias.rows(), bias.cols()),
            });
        }
        Ok(DenseLayer {
            weight: ParamTensor::new(weight),
            bias: ParamTensor::new(bias),
        })
    }

    pub fn input_size(&self) -> usize {
        self.weight.value.cols()
    }

    pub fn output_size(&self) -> usize {
        self.weight.value.rows()
    }

    /// `activation(W x + b)` on slices; shape errors are programmer errors
    /// here and panic. Use [`dense_forward`] at validated boundaries.
    pub fn forward(&self, x: &[f64], activation: Activation) -> Vec<f64> {
        let (out, _) = self.forward_cached(x, activation);
        out
    }

    pub(crate) fn forward_cached(
        &self,
        x: &[f64],
        activation: Activation,
    ) -> (Vec<f64>, DenseCache) {
        let mut pre = self.weight.value.matvec(x);
        for (p, b) in pre.iter_mut().zip(self.bias.value.as_slice()) {
            *p += *b;
        }
        let out = pre.iter().map(|&v| activation.apply(v)).collect();
        (
            out,
            DenseCache {
                input: x.to_vec(),
                pre,
            },
        )
    }

    /// Accumulates weight and bias gradients for one sample and returns the
    /// gradient with respect to the layer input.
    pub(crate) fn backward(
        &mut self,
        cache: &DenseCache,
        d_out: &[f64],
        activation: Activation,
    ) -> Vec<f64> {
        assert_eq!(
            d_out.len(),
            self.output_size(),
            "dense backward: d_out size"
        );
        let d_pre: Vec<f64> = d_out
            .iter()
            .zip(&cache.pre)
            .map(|(&d, &pre)| d * activation.derivative(pre))
            .collect();
        self.weight.grad.add_outer(&d_pre, &cache.input);
        for (g, d) in self.bias.grad.as_mut_slice().iter_mut().zip(&d_pre) {
            *g += *d;
        }
        self.weight.value.matvec_transpose(&d_pre)
    }
}

/// Checked dense forward pass: `activation(W x + b)` for a column vector `x`.
pub fn dense_forward(
    weight: &ParamTensor,
    bias: &ParamTensor,
    x: &Matrix,
    activation: Activation,
) -> Result<Matrix> {
    if x.cols() != 1 {
        return Err(Error::ShapeMismatch {
            context: "dense_forward".into(),
            expected: "column vector input (cols = 1)".into(),
            got: format!("{}x{}", x.rows(), x.cols()),
        });
    }
    if weight.value.cols() != x.rows() {
        return Err(Error::ShapeMismatch {
            context: "dense_forward".into(),
            expected: format!("input length {}", weight.value.cols()),
            got: format!("input length {}", x.rows()),
        });
    }
    if bias.value.rows() != weight.value.rows() || bias.value.cols() != 1 {
        return Err(Error::ShapeMismatch {
            context: "dense_forward".into(),
            expected: format!("bias {}x1", weight.value.rows()),
            got: format!("bias {}x{}", bias.value.rows(), bias.value.cols()),
        });
    }
    let mut out = weight.value.matvec(x.as_slice());
    for (o, b) in out.iter_mut().zip(bias.value.as_slice()) {
        *o = activation.apply(*o + *b);
    }
    Matrix::from_vec(weight.value.rows(), 1, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tensor(rows: usize, cols: usize, data: Vec<f64>) -> ParamTensor {
        ParamTensor::new(Matrix::from_vec(rows, cols, data).unwrap())
    }

    #[test]
    fn identity_weight_zero_bias_is_identity() {
        let w = ParamTensor::new(Matrix::identity(3));
        let b = ParamTensor::new(Matrix::zeros(3, 1));
        let x = Matrix::column(&[1.5, -2.0, 0.25]).unwrap();
        let y = dense_forward(&w, &b, &x, Activation::None).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn relu_passes_positive_sum() {
        let w = tensor(1, 2, vec![1.0, 1.0]);
        let b = tensor(1, 1, vec![0.0]);
        let x = Matrix::column(&[2.0, 3.0]).unwrap();
        let y = dense_forward(&w, &b, &x, Activation::Relu).unwrap();
        assert_eq!(y.as_slice(), &[5.0]);
    }

    #[test]
    fn relu_clips_negative_sum() {
        let w = tensor(1, 2, vec![-1.0, 0.0]);
        let b = tensor(1, 1, vec![0.0]);
        let x = Matrix::column(&[2.0, 3.0]).unwrap();
        let y = dense_forward(&w, &b, &x, Activation::Relu).unwrap();
        assert_eq!(y.as_slice(), &[0.0]);
    }

    #[test]
    fn shape_mismatch_names_both_shapes() {
        let w = tensor(2, 3, vec![0.0; 6]);
        let b = tensor(2, 1, vec![0.0; 2]);
        let x = Matrix::column(&[1.0, 2.0]).unwrap();
        let msg = dense_forward(&w, &b, &x, Activation::None)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("length 3"), "{msg}");
        assert!(msg.contains("length 2"), "{msg}");
    }

    #[test]
    fn layer_forward_matches_checked_forward() {
        let w = Matrix::from_vec(2, 3, vec![0.5, -1.0, 0.25, 2.0, 0.0, -0.5]).unwrap();
        let b = Matrix::column(&[0.1, -0.2]).unwrap();
        let layer = DenseLayer::new(w.clone(), b.clone()).unwrap();
        let x = [1.0, 2.0, -1.0];
        let fast = layer.forward(&x, Activation::Relu);
        let checked = dense_forward(
            &ParamTensor::new(w),
            &ParamTensor::new(b),
            &Matrix::column(&x).unwrap(),
            Activation::Relu,
        )
        .unwrap();
        assert_eq!(fast, checked.as_slice());
    }

    #[test]
    fn backward_matches_hand_computed_gradients() {
        // y = relu(W x + b), W = [[1, -1]], b = [0.5], x = [2, 1] → pre = 1.5.
        // With d_out = [2]: dW = [[4, 2]], db = [2], dx = [2, -2].
        let mut layer = DenseLayer::new(
            Matrix::from_vec(1, 2, vec![1.0, -1.0]).unwrap(),
            Matrix::column(&[0.5]).unwrap(),
        )
        .unwrap();
        let (out, cache) = layer.forward_cached(&[2.0, 1.0], Activation::Relu);
        assert_eq!(out, vec![1.5]);
        let dx = layer.backward(&cache, &[2.0], Activation::Relu);
        assert_eq!(layer.weight.grad.as_slice(), &[4.0, 2.0]);
        assert_eq!(layer.bias.grad.as_slice(), &[2.0]);
        assert_eq!(dx, vec![2.0, -2.0]);
    }

    #[test]
    fn backward_blocks_gradient_through_clipped_relu() {
        let mut layer = DenseLayer::new(
            Matrix::from_vec(1, 2, vec![-1.0, 0.0]).unwrap(),
            Matrix::column(&[0.0]).unwrap(),
        )
        .unwrap();
        let (out, cache) = layer.forward_cached(&[2.0, 3.0], Activation::Relu);
        assert_eq!(out, vec![0.0]);
        let dx = layer.backward(&cache, &[5.0], Activation::Relu);
        assert!(layer.weight.grad.as_slice().iter().all(|g| *g == 0.0));
        assert_eq!(dx, vec![0.0, 0.0]);
    }
}
