//! Central finite differences, used to verify analytic gradients.

/// Numerical gradient of `f` at `theta`: `(f(θ+εe) - f(θ-εe)) / 2ε` per
/// coordinate. `f` must be deterministic; `eps` must be positive.
pub fn finite_difference_gradient<F>(mut f: F, theta: &[f64], eps: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(eps > 0.0, "finite differences need a positive step");
    let mut point = theta.to_vec();
    let mut grad = vec![0.0; theta.len()];
    for k in 0..theta.len() {
        let original = point[k];
        point[k] = original + eps;
        let plus = f(&point);
        point[k] = original - eps;
        let minus = f(&point);
        point[k] = original;
        grad[k] = (plus - minus) / (2.0 * eps);
    }
    grad
}

/// Denominator floor for [`relative_error`]. Central differences on an f64
/// loss of order one resolve roughly `ulp(f) / 2eps`, about `5e-12` at
/// `eps = 1e-5`, so for components much smaller than this floor the
/// difference is dominated by that noise and a pure ratio would report it
/// as error. Discrepancies above `1e-10` in absolute terms still surface,
/// since against this floor they exceed any sane tolerance.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-6;

/// `|a - b| / max(|a|, |b|, floor)`: a scale-free gradient comparison that
/// stays meaningful when both values are near zero.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(RELATIVE_ERROR_FLOOR)
}

/// Worst pairwise [`relative_error`] over two equal-length slices.
pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "gradient slices differ in length");
    a.iter()
        .zip(b)
        .map(|(&x, &y)| relative_error(x, y))
        .fold(0.0, f64::max)
}
