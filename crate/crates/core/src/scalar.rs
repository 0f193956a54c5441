//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the model can be evaluated in (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Display + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into the scalar type.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy view as `f64`, used for error reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Real `n`-th root. Odd roots of negative numbers return the signed real root,
/// even roots of negative numbers return `None`.
pub fn real_root<T: Scalar>(x: T, n: u32) -> Option<T> {
    match n {
        0 => None,
        1 => Some(x),
        2 => (x >= T::zero()).then(|| x.sqrt()),
        3 => Some(x.cbrt()),
        _ => {
            let inv = T::one() / T::from_u32(n)?;
            if x >= T::zero() {
                Some(x.powf(inv))
            } else if n % 2 == 1 {
                Some(-(-x).powf(inv))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        assert_eq!(real_root(5.0_f64, 1), Some(5.0));
        assert_eq!(real_root(4.0_f64, 2), Some(2.0));
        assert_eq!(real_root(-4.0_f64, 2), None);
        assert_eq!(real_root(-8.0_f64, 3), Some(-2.0));
        assert!((real_root(-32.0_f64, 5).unwrap() + 2.0).abs() < 1e-14);
        assert_eq!(real_root(-16.0_f64, 4), None);
        assert_eq!(real_root(1.0_f64, 0), None);
    }
}
