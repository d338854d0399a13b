use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumCast, ToPrimitive};

/// Floating point scalar the whole toolkit is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Default relative equality factor for oracle comparisons.
    ///
    /// 1e-9 for `f64`; widened for narrower types so the Equal band is
    /// never below a few ulps.
    fn default_eq_factor() -> Self {
        let floor = Self::epsilon() * Self::lit(16.0);
        Self::lit(1e-9).max(floor)
    }

    /// Converts an `f64` literal; every literal used in this crate is representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
