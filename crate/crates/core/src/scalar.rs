use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, NumCast};

/// Floating point type the numerics are written against.
///
/// Implemented for every type with the listed capabilities, which in practice
/// means `f32` and `f64`. Everything in this crate needs transcendental
/// functions, so exact rational scalars are not supported.
pub trait Scalar:
    Float + FloatConst + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or sample into `Self`.
    fn lit(value: f64) -> Self {
        <Self as NumCast>::from(value).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion to `f64`, used for error reporting and I/O.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count into `Self`.
    fn from_count(count: u64) -> Self {
        <Self as NumCast>::from(count).expect("count representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + NumCast + Debug + Display + Default + Send + Sync + 'static
{
}
