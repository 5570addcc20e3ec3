//! Planar points, disks and exact-decision predicates.
//!
//! `orient2d` and `incircle` never return a wrong sign. For `f64` (and `f32`,
//! which widens to `f64` losslessly) they use adaptive-precision expansion
//! arithmetic: a floating-point filter with an exact fallback. Rationals are
//! evaluated directly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point2<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
}

impl<T: Real> Point2<T> {
    #[inline]
    pub fn dist_sq(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Real> From<(T, T)> for Point2<T> {
    fn from((x, y): (T, T)) -> Self {
        Self::new(x, y)
    }
}

/// Closed disk described by its center and squared radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk<T> {
    pub center: Point2<T>,
    pub radius_sq: T,
}

impl<T: Real> Disk<T> {
    pub fn radius(&self) -> T {
        self.radius_sq.sqrt()
    }

    pub fn area(&self) -> T {
        T::PI() * self.radius_sq
    }

    /// Strict containment in floating point.
    #[inline]
    pub fn contains_strict(&self, p: &Point2<T>) -> bool {
        self.center.dist_sq(p) < self.radius_sq
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> (Point2<T>, Point2<T>) {
        let r = self.radius();
        (
            Point2::new(self.center.x - r, self.center.y - r),
            Point2::new(self.center.x + r, self.center.y + r),
        )
    }
}

/// Sign of a predicate determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    #[inline]
    pub fn of_f64(v: f64) -> Self {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    #[inline]
    pub fn flip(self) -> Self {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// Coordinate types with exact orientation and in-circle decisions.
pub trait ExactPredicates: Sized {
    /// Sign of twice the signed area of `(a, b, c)`.
    fn orient2d_sign(a: &Point2<Self>, b: &Point2<Self>, c: &Point2<Self>) -> Sign;

    /// Sign of the lifted in-circle determinant: positive when `d` is inside
    /// the circle through a counterclockwise `(a, b, c)`.
    fn incircle_sign(
        a: &Point2<Self>,
        b: &Point2<Self>,
        c: &Point2<Self>,
        d: &Point2<Self>,
    ) -> Sign;
}

#[inline]
fn rc(p: &Point2<f64>) -> robust::Coord<f64> {
    robust::Coord { x: p.x, y: p.y }
}

impl ExactPredicates for f64 {
    #[inline]
    fn orient2d_sign(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> Sign {
        Sign::of_f64(robust::orient2d(rc(a), rc(b), rc(c)))
    }

    #[inline]
    fn incircle_sign(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>, d: &Point2<f64>) -> Sign {
        Sign::of_f64(robust::incircle(rc(a), rc(b), rc(c), rc(d)))
    }
}

#[inline]
fn widen(p: &Point2<f32>) -> Point2<f64> {
    Point2::new(p.x as f64, p.y as f64)
}

impl ExactPredicates for f32 {
    fn orient2d_sign(a: &Point2<f32>, b: &Point2<f32>, c: &Point2<f32>) -> Sign {
        f64::orient2d_sign(&widen(a), &widen(b), &widen(c))
    }

    fn incircle_sign(a: &Point2<f32>, b: &Point2<f32>, c: &Point2<f32>, d: &Point2<f32>) -> Sign {
        f64::incircle_sign(&widen(a), &widen(b), &widen(c), &widen(d))
    }
}

fn rational_sign(v: &BigRational) -> Sign {
    if v.is_zero() {
        Sign::Zero
    } else if v.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

impl ExactPredicates for BigRational {
    fn orient2d_sign(a: &Point2<Self>, b: &Point2<Self>, c: &Point2<Self>) -> Sign {
        let det = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
        rational_sign(&det)
    }

    fn incircle_sign(
        a: &Point2<Self>,
        b: &Point2<Self>,
        c: &Point2<Self>,
        d: &Point2<Self>,
    ) -> Sign {
        let (adx, ady) = (&a.x - &d.x, &a.y - &d.y);
        let (bdx, bdy) = (&b.x - &d.x, &b.y - &d.y);
        let (cdx, cdy) = (&c.x - &d.x, &c.y - &d.y);
        let alift = &adx * &adx + &ady * &ady;
        let blift = &bdx * &bdx + &bdy * &bdy;
        let clift = &cdx * &cdx + &cdy * &cdy;
        let det = alift * (&bdx * &cdy - &cdx * &bdy)
            + blift * (&cdx * &ady - &adx * &cdy)
            + clift * (&adx * &bdy - &bdx * &ady);
        rational_sign(&det)
    }
}

/// Exact conversion of a finite `f64` point to rationals.
pub fn to_rational(p: &Point2<f64>) -> Point2<BigRational> {
    let conv = |v: f64| {
        BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    };
    Point2::new(conv(p.x), conv(p.y))
}

/// Orientation of the triple: `+1` counterclockwise, `-1` clockwise, `0` collinear.
#[inline]
pub fn orient2d<T: ExactPredicates>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> Sign {
    T::orient2d_sign(a, b, c)
}

/// In-circle test for `p` against the circle through `(a, b, c)`.
///
/// With `(a, b, c)` counterclockwise the result is `Positive` inside,
/// `Negative` outside and `Zero` on the circle. Reversing the orientation of
/// the triple flips the sign. Exact for `f64` inputs as long as no
/// intermediate product underflows.
pub fn incircle<T: ExactPredicates>(
    a: &Point2<T>,
    b: &Point2<T>,
    c: &Point2<T>,
    p: &Point2<T>,
) -> Result<Sign> {
    if T::orient2d_sign(a, b, c) == Sign::Zero {
        return Err(Error::Degenerate("incircle of collinear points".into()));
    }
    Ok(T::incircle_sign(a, b, c, p))
}

/// In-circle test with ties broken by symbolic perturbation.
///
/// Each point's lifted height `x² + y²` is raised by an infinitesimal that
/// dominates every smaller-indexed point's, so the highest index among the
/// four behaves as if it sat just outside the others' circle. The result is
/// never `Zero` for four distinct cocircular points. `(a, b, c)` must be
/// counterclockwise.
#[inline]
pub fn incircle_perturbed<T: ExactPredicates>(
    (a, ia): (&Point2<T>, u32),
    (b, ib): (&Point2<T>, u32),
    (c, ic): (&Point2<T>, u32),
    (d, id): (&Point2<T>, u32),
) -> Sign {
    let s = T::incircle_sign(a, b, c, d);
    if s != Sign::Zero {
        return s;
    }
    let top = ia.max(ib).max(ic).max(id);
    if top == id {
        Sign::Negative
    } else if top == ia {
        T::orient2d_sign(d, b, c)
    } else if top == ib {
        T::orient2d_sign(a, d, c)
    } else {
        T::orient2d_sign(a, b, d)
    }
}

/// Circumscribed disk of a non-degenerate triangle.
pub fn circumdisk<T: Real>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> Result<Disk<T>> {
    if T::orient2d_sign(a, b, c) == Sign::Zero {
        return Err(Error::Degenerate("circumdisk of collinear points".into()));
    }
    Ok(circumdisk_unchecked(a, b, c))
}

/// Circumscribed disk without the collinearity check.
#[inline]
pub fn circumdisk_unchecked<T: Real>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> Disk<T> {
    let bx = b.x - a.x;
    let by = b.y - a.y;
    let cx = c.x - a.x;
    let cy = c.y - a.y;
    let bl = bx * bx + by * by;
    let cl = cx * cx + cy * cy;
    let d = (bx * cy - by * cx) * T::lit(2.0);
    let ux = (cy * bl - by * cl) / d;
    let uy = (bx * cl - cx * bl) / d;
    Disk {
        center: Point2::new(a.x + ux, a.y + uy),
        radius_sq: ux * ux + uy * uy,
    }
}
