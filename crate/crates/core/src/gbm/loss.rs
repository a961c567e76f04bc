use crate::scalar::{sigmoid, softplus, Scalar};

/// Gradient and hessian of the logistic log-loss with respect to the raw
/// score: `g = p - y`, `h = p (1 - p)`, `p = sigmoid(raw)`.
///
/// `h` is floored at the smallest positive value so it stays strictly
/// positive for extreme scores.
#[inline]
pub fn logistic_grad_hess<T: Scalar>(raw: T, label: bool) -> (T, T) {
    let p = sigmoid(raw);
    let q = sigmoid(-raw);
    let g = if label { -q } else { p };
    (g, (p * q).max(T::min_positive_value()))
}

/// Log-loss of a single prediction.
#[inline]
pub fn log_loss<T: Scalar>(raw: T, label: bool) -> T {
    if label {
        softplus(-raw)
    } else {
        softplus(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_zero() {
        assert_eq!(logistic_grad_hess(0.0f64, true), (-0.5, 0.25));
        assert_eq!(logistic_grad_hess(0.0f64, false), (0.5, 0.25));
    }

    #[test]
    fn bounds_hold_for_extreme_scores() {
        for &raw in &[-1e4f64, -50.0, -3.0, 0.7, 40.0, 1e4] {
            for label in [false, true] {
                let (g, h) = logistic_grad_hess(raw, label);
                assert!((-1.0..=1.0).contains(&g));
                assert!(h > 0.0 && h <= 0.25);
            }
        }
    }

    #[test]
    fn loss_matches_definition() {
        let p = sigmoid(1.3f64);
        assert!((log_loss(1.3f64, true) + p.ln()).abs() < 1e-14);
        assert!((log_loss(1.3f64, false) + (1.0 - p).ln()).abs() < 1e-14);
    }
}
