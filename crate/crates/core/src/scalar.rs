//! Floating-point scalar abstraction used by every numerical routine.
//!
//! Exact lattice and polyhedral computations never go through this trait;
//! they use [`crate::exact::Rational`] directly.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar for the numerical layers (`f32` or `f64`).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}
