use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the solver and models are written against.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into `Self`.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest pivot magnitude the simplex accepts.
    fn pivot_eps() -> Self {
        Self::lit(1e-10).max(Self::epsilon() * Self::lit(100.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub(crate) fn max_abs<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivot_eps_tracks_precision() {
        assert_eq!(f64::pivot_eps(), 1e-10);
        assert!(f32::pivot_eps() > 1e-6);
    }
}
