//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }

    /// `|x|^{2k}` with the convention `0^{2k} = 0` for `k > 0`.
    fn degenerate_weight(x: Self, k: Self) -> Self {
        let ax = x.abs();
        if ax == Self::zero() {
            if k > Self::zero() {
                Self::zero()
            } else {
                Self::one()
            }
        } else {
            (Self::lit(2.0) * k * ax.ln()).exp()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Euclidean dot product.
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// `y += alpha * x`
pub(crate) fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_weight_convention() {
        assert_eq!(f64::degenerate_weight(0.0, 1.0), 0.0);
        assert_eq!(f64::degenerate_weight(0.0, 1e-8), 0.0);
        assert!((f64::degenerate_weight(0.5, 1.0) - 0.25).abs() < 1e-15);
        assert!((f64::degenerate_weight(-0.5, 1.5) - 0.125).abs() < 1e-15);
        assert!((f32::degenerate_weight(2.0, 1.0) - 4.0).abs() < 1e-5);
    }
}
