//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point field the algebra and the solver are written against.
///
/// Implemented for `f32` and `f64`. Tolerances quoted in `f64` terms are
/// mapped through [`Real::tol`], which never lets a threshold fall below a
/// small multiple of the type's machine epsilon.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// An `f64` tolerance, floored at `64 * epsilon` for the type.
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `c^(1/m)` evaluated as `exp(ln(c) / m)`, with `c = 0` mapped to exactly zero.
pub fn root_m<T: Real>(c: T, m: usize) -> T {
    if c == T::zero() {
        T::zero()
    } else {
        (c.ln() / T::count(m)).exp()
    }
}

/// Binomial coefficient as a scalar.
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    T::lit(acc.round())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_m_zero_branch() {
        assert_eq!(root_m(0.0f64, 3), 0.0);
        assert!((root_m(8.0f64, 3) - 2.0).abs() < 1e-14);
        assert!((root_m(4.0f32, 2) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial::<f64>(6, 3), 20.0);
        assert_eq!(binomial::<f64>(4, 0), 1.0);
        assert_eq!(binomial::<f64>(2, 3), 0.0);
    }

    #[test]
    fn tolerance_floor() {
        assert_eq!(<f64 as Real>::tol(1e-3), 1e-3);
        assert!(<f32 as Real>::tol(1e-13) > 1e-6);
    }
}
