//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign};

/// Real floating-point type the simulator is generic over (`f32` or `f64`).
pub trait Real: Float + FromPrimitive + NumAssign + Debug + Display + Default + Sum + Send + Sync + 'static {
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    /// Converts `self` to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

/// Builds a complex number from real and imaginary parts.
pub fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

/// Multiplies `z` by `i^k`.
pub fn mul_i_pow<T: Real>(z: C<T>, k: u8) -> C<T> {
    match k & 3 {
        0 => z,
        1 => Complex::new(-z.im, z.re),
        2 => Complex::new(-z.re, -z.im),
        _ => Complex::new(z.im, -z.re),
    }
}

/// Returns `i^k` as a complex number.
pub fn i_pow<T: Real>(k: u8) -> C<T> {
    mul_i_pow(Complex::new(T::one(), T::zero()), k)
}
