//! Scalar abstraction.
//!
//! Every numeric kernel in the crate is generic over the floating point type
//! through [`Real`]; the concrete `*64` aliases at the crate root pin `f64`
//! for the CLI and the verification suites.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + core::fmt::Debug + Send + Sync + 'static
{
    /// Converts an `f64` constant (tolerances, formula coefficients).
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the generic scalar.
pub type C<T> = Complex<T>;

/// Complex constant from `f64` parts.
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Concrete `f64` complex constant (handy where inference has no anchor).
pub fn c64(re: f64, im: f64) -> C<f64> {
    Complex::new(re, im)
}

/// The imaginary unit.
pub fn im_unit<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_convert() {
        assert_eq!(f64::of(0.5), 0.5);
        assert_eq!(f32::of(0.5), 0.5f32);
        let z: C<f64> = c(1.0, -2.0);
        assert_eq!(z.re, 1.0);
        assert_eq!(z.im, -2.0);
    }
}
