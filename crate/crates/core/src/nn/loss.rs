//! Binary cross entropy over a batch of attack probabilities.

use crate::error::{Error, Result};

/// Probabilities are clamped into `[EPS, 1 - EPS]` before the logs so a
/// saturated prediction cannot produce an infinite loss.
pub(crate) const BCE_EPS: f64 = 1e-12;

/// Mean binary cross entropy: `-(1/M) * sum(y*ln(p) + (1-y)*ln(1-p))`.
///
/// Labels must be 0 or 1; predictions must be finite. Returns an error on a
/// length mismatch or an empty batch.
pub fn bce_loss(labels: &[u8], predictions: &[f64]) -> Result<f64> {
    if labels.len() != predictions.len() {
        return Err(Error::ShapeMismatch {
            context: "bce_loss".into(),
            expected: format!("{} predictions", labels.len()),
            got: format!("{} predictions", predictions.len()),
        });
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput("bce_loss"));
    }
    let mut total = 0.0;
    for (&y, &p) in labels.iter().zip(predictions) {
        if y > 1 {
            return Err(Error::InvalidArgument(format!(
                "bce_loss label must be 0 or 1, got {y}"
            )));
        }
        if !p.is_finite() {
            return Err(Error::NonFinite("bce_loss prediction".into()));
        }
        let p = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
        total -= if y == 1 { p.ln() } else { (1.0 - p).ln() };
    }
    Ok(total / labels.len() as f64)
}
