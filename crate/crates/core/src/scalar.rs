//! Generic floating-point scalar for the spectral core.

use num_traits as nt;

/// Floating point scalar: f32 or f64.
///
/// Everything the sine-basis core needs: ordinary float arithmetic,
/// π, and conversions from literals and sizes.
pub trait Real:
    nt::Float + nt::FloatConst + nt::FromPrimitive + nt::NumAssign + std::iter::Sum + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Lossy conversion from an f64 literal.
    fn lit(v: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(v).expect("literal not representable")
    }

    /// Conversion from a count or index.
    fn of_usize(v: usize) -> Self {
        <Self as nt::FromPrimitive>::from_usize(v).expect("count not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
