//! Scalar abstraction shared by the geometric and analytic layers.
//!
//! Geometry and the tail model are written against [`Real`], so they run in
//! `f32` or `f64`. Exact sign decisions live in [`ExactPredicates`], which is
//! also implemented for arbitrary-precision rationals.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::geom::ExactPredicates;

/// Floating-point coordinate type usable throughout the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + ExactPredicates
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute tolerance for root finding at magnitude `x`.
    #[inline]
    fn solve_tol(x: Self) -> Self {
        let floor = Self::lit(1e-9);
        let rel = Self::epsilon() * Self::lit(8.0) * x.abs().max(Self::one());
        floor.max(rel)
    }
}

impl Real for f32 {}
impl Real for f64 {}
