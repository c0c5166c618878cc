//! Floating-point abstraction shared by every solver.
//!
//! All math in this crate is written against [`Scalar`], which `f32` and
//! `f64` implement. Concrete aliases for the common instantiations live at
//! the crate root.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar usable by the solvers.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant. Panics only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    /// `max(self, 0)`.
    #[inline]
    fn pos(self) -> Self {
        self.max(Self::zero())
    }

    /// Lossy conversion for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative difference `|a-b| / max(|a|,|b|,tiny)`.
    #[inline]
    fn rel_diff(self, other: Self) -> Self {
        let scale = self.abs().max(other.abs()).max(Self::min_positive_value());
        (self - other).abs() / scale
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
