use std::fmt;

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Real scalar the numerical code is generic over.
///
/// `RealField` already brings the elementary functions and `FromPrimitive`;
/// the extra bounds are what the simulation needs for reporting and for
/// sharing values across rayon workers.
pub trait Real:
    RealField + Copy + ToPrimitive + fmt::LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal or parameter.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance appropriate for the precision.
    fn rel_tol() -> Self;
}

impl Real for f32 {
    fn rel_tol() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn rel_tol() -> Self {
        1e-10
    }
}

pub type Cplx<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// `exp(j·theta)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}
