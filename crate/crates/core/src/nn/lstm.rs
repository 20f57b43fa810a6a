//! A single LSTM cell: parameters, one time step forward, and the matching
//! backward step for truncated backpropagation through time.
//!
//! Gate pre-activations are stacked in one `4h` block in the fixed order
//! `[input, forget, cell-candidate, output]`.

use crate::error::{Error, Result};
use crate::nn::activation::sigmoid;
use crate::tensor::{Matrix, ParamTensor};

/// Learnable state of one LSTM cell.
///
/// `input_weights` is `4h x input`, `recurrent_weights` is `4h x h`, and
/// `biases` is a `4h` column, where `h` is the hidden size.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmCellParams {
    pub input_weights: ParamTensor,
    pub recurrent_weights: ParamTensor,
    pub biases: ParamTensor,
}

/// Forward state of one time step, kept for the backward pass.
#[derive(Debug, Clone)]
pub(crate) struct LstmStepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub i: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
    pub tanh_c: Vec<f64>,
}

impl LstmCellParams {
    pub fn new(input_weights: Matrix, recurrent_weights: Matrix, biases: Matrix) -> Result<Self> {
        let hidden = recurrent_weights.cols();
        let gates = 4 * hidden;
        if input_weights.rows() != gates
            || recurrent_weights.rows() != gates
            || biases.rows() != gates
            || biases.cols() != 1
        {
            return Err(Error::ShapeMismatch {
                context: "LstmCellParams::new".into(),
                expected: format!(
                    "input_weights {gates}x*, recurrent_weights {gates}x{hidden}, biases {gates}x1"
                ),
                got: format!(
                    "input_weights {}x{}, recurrent_weights {}x{}, biases {}x{}",
                    input_weights.rows(),
                    input_weights.cols(),
                    recurrent_weights.rows(),
                    recurrent_weights.cols(),
                    biases.rows(),
                    biases.cols()
                ),
            });
        }
        Ok(LstmCellParams {
            input_weights: ParamTensor::new(input_weights),
            recurrent_weights: ParamTensor::new(recurrent_weights),
            biases: ParamTensor::new(biases),
        })
    }

    pub fn zeros(input: usize, hidden: usize) -> Self {
        LstmCellParams::new(
            Matrix::zeros(4 * hidden, input),
            Matrix::zeros(4 * hidden, hidden),
            Matrix::zeros(4 * hidden, 1),
        )
        .expect("zero-filled shapes are consistent")
    }

    pub fn input_size(&self) -> usize {
        self.input_weights.value.cols()
    }

    pub fn hidden_size(&self) -> usize {
        self.recurrent_weights.value.cols()
    }

    pub(crate) fn step_cached(
        &self,
        x: &[f64],
        h_prev: &[f64],
        c_prev: &[f64],
    ) -> (Vec<f64>, Vec<f64>, LstmStepCache) {
        let h = self.hidden_size();
        debug_assert_eq!(x.len(), self.input_size());
        debug_assert_eq!(h_prev.len(), h);
        debug_assert_eq!(c_prev.len(), h);

        let mut pre = self.input_weights.value.matvec(x);
        let rec = self.recurrent_weights.value.matvec(h_prev);
        for ((p, r), b) in pre.iter_mut().zip(&rec).zip(self.biases.value.as_slice()) {
            *p += *r + *b;
        }

        let i: Vec<f64> = pre[0..h].iter().map(|&v| sigmoid(v)).collect();
        let f: Vec<f64> = pre[h..2 * h].iter().map(|&v| sigmoid(v)).collect();
        let g: Vec<f64> = pre[2 * h..3 * h].iter().map(|&v| v.tanh()).collect();
        let o: Vec<f64> = pre[3 * h..4 * h].iter().map(|&v| sigmoid(v)).collect();

        let mut c = vec![0.0; h];
        for k in 0..h {
            c[k] = f[k] * c_prev[k] + i[k] * g[k];
        }
        let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
        let h_new: Vec<f64> = o.iter().zip(&tanh_c).map(|(o, t)| o * t).collect();

        let cache = LstmStepCache {
            x: x.to_vec(),
            h_prev: h_prev.to_vec(),
            c_prev: c_prev.to_vec(),
            i,
            f,
            g,
            o,
            tanh_c,
        };
        (h_new, c, cache)
    }

    /// Backward through one step. `d_h` and `d_c_in` are the loss gradients
    /// arriving at this step's hidden and cell outputs. Accumulates parameter
    /// gradients and returns `(d_x, d_h_prev, d_c_prev)`.
    pub(crate) fn step_backward(
        &mut self,
        cache: &LstmStepCache,
        d_h: &[f64],
        d_c_in: &[f64],
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let h = self.hidden_size();
        let mut d_pre = vec![0.0; 4 * h];
        let mut d_c_prev = vec![0.0; h];
        for k in 0..h {
            let tanh_c = cache.tanh_c[k];
            let d_c = d_c_in[k] + d_h[k] * cache.o[k] * (1.0 - tanh_c * tanh_c);
            let (i, f, g, o) = (cache.i[k], cache.f[k], cache.g[k], cache.o[k]);
            d_pre[k] = d_c * g * i * (1.0 - i);
            d_pre[h + k] = d_c * cache.c_prev[k] * f * (1.0 - f);
            d_pre[2 * h + k] = d_c * i * (1.0 - g * g);
            d_pre[3 * h + k] = d_h[k] * tanh_c * o * (1.0 - o);
            d_c_prev[k] = d_c * f;
        }

        self.input_weights.grad.add_outer(&d_pre, &cache.x);
        self.recurrent_weights.grad.add_outer(&d_pre, &cache.h_prev);
        for (b, d) in self.biases.grad.as_mut_slice().iter_mut().zip(&d_pre) {
            *b += *d;
        }

        let d_x = self.input_weights.value.matvec_transpose(&d_pre);
        let d_h_prev = self.recurrent_weights.value.matvec_transpose(&d_pre);
        (d_x, d_h_prev, d_c_prev)
    }
}

/// Checked single LSTM step. Returns the new hidden and cell states.
pub fn lstm_cell_step(
    params: &LstmCellParams,
    x_t: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let hidden = params.hidden_size();
    if x_t.len() != params.input_size() || h_prev.len() != hidden || c_prev.len() != hidden {
        return Err(Error::ShapeMismatch {
            context: "lstm_cell_step".into(),
            expected: format!(
                "x length {}, h_prev length {hidden}, c_prev length {hidden}",
                params.input_size()
            ),
            got: format!(
                "x length {}, h_prev length {}, c_prev length {}",
                x_t.len(),
                h_prev.len(),
                c_prev.len()
            ),
        });
    }
    let (h, c, _) = params.step_cached(x_t, h_prev, c_prev);
    Ok((h, c))
}
