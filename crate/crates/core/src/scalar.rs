//! Floating-point abstraction shared by the boosting, SHAP and metric code.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for scores, gradients, leaf values and attributions.
///
/// Implemented for `f32` and `f64`. Persisted documents always store `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("every f64 converts to a float type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("counts are representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Numerically stable logistic function.
#[inline]
pub fn sigmoid<T: Scalar>(raw: T) -> T {
    if raw >= T::zero() {
        T::one() / (T::one() + (-raw).exp())
    } else {
        let e = raw.exp();
        e / (T::one() + e)
    }
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn softplus<T: Scalar>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

/// Formats a real with 17 significant digits, the precision used by every
/// text output of this crate.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        // keep "-0" out of persisted files
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_symmetric_and_bounded() {
        for &r in &[-800.0f64, -30.0, -1.0, 0.0, 1.0, 30.0, 800.0] {
            let p = sigmoid(r);
            assert!((0.0..=1.0).contains(&p));
            assert!((p + sigmoid(-r) - 1.0).abs() < 1e-15);
        }
        assert_eq!(sigmoid(0.0f32), 0.5);
    }

    #[test]
    fn softplus_matches_naive_in_safe_range() {
        for &x in &[-20.0f64, -1.5, 0.0, 0.3, 12.0] {
            assert!((softplus(x) - (1.0 + x.exp()).ln()).abs() < 1e-12);
        }
        assert_eq!(softplus(1000.0f64), 1000.0);
    }

    #[test]
    fn fmt_real_round_trips() {
        for &x in &[0.1f64, -2.2876, 1.0 / 3.0, 1e-300, 12345.678] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_real(-0.0), "0");
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
    }
}
