//! Voronoi flowers and their Φ-content.
//!
//! The flower of an interior vertex is the union of the circumdisks of its
//! incident Delaunay triangles. Its area is computed exactly (up to rounding)
//! by walking the boundary of the union: every disk contributes the arcs not
//! covered by any other disk, and Green's theorem turns each arc into a
//! closed-form term.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::delaunay::Triangulation;
use crate::error::{domain, Error, Result};
use crate::geom::{circumdisk_unchecked, Disk, Point2};
use crate::scalar::Real;

/// Relative tolerance under which two circles count as tangent.
pub const TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Flower<T> {
    pub nucleus: usize,
    pub petals: Vec<Disk<T>>,
    pub area: T,
}

/// Builds the flower of vertex `v`. Hull vertices have unbounded flowers.
pub fn voronoi_flower<T: Real>(t: &Triangulation<T>, v: usize) -> Result<Flower<T>> {
    let fan = t.incident_triangles(v)?;
    if t.is_hull(v) {
        return Err(Error::UnboundedFlower(v));
    }
    let pts = t.vertices();
    let petals: Vec<Disk<T>> = fan
        .iter()
        .map(|&f| {
            let [a, b, c] = t.triangle(f);
            circumdisk_unchecked(&pts[a], &pts[b], &pts[c])
        })
        .collect();
    let area = union_area_about(&petals, pts[v]);
    Ok(Flower {
        nucleus: v,
        petals,
        area,
    })
}

/// How to evaluate the Φ-content of a flower.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiMethod {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEstimate<T> {
    pub value: T,
    /// Zero for the exact method.
    pub std_error: T,
}

pub fn phi_content<T: Real>(f: &Flower<T>, method: PhiMethod) -> Result<PhiEstimate<T>> {
    match method {
        PhiMethod::Exact => Ok(PhiEstimate {
            value: f.area,
            std_error: T::zero(),
        }),
        PhiMethod::MonteCarlo { samples, seed } => union_area_mc(&f.petals, samples, seed),
    }
}

/// Hit-or-miss estimate of the union area over the disks' bounding box.
pub fn union_area_mc<T: Real>(
    disks: &[Disk<T>],
    samples: u64,
    seed: u64,
) -> Result<PhiEstimate<T>> {
    if samples == 0 {
        return domain("Monte-Carlo area needs at least one sample");
    }
    if disks.is_empty() {
        return Ok(PhiEstimate {
            value: T::zero(),
            std_error: T::zero(),
        });
    }
    let (mut lo, mut hi) = disks[0].bounds();
    for d in &disks[1..] {
        let (l, h) = d.bounds();
        lo = Point2::new(lo.x.min(l.x), lo.y.min(l.y));
        hi = Point2::new(hi.x.max(h.x), hi.y.max(h.y));
    }
    let (w, h) = ((hi.x - lo.x).to_f64_lossy(), (hi.y - lo.y).to_f64_lossy());
    let (x0, y0) = (lo.x.to_f64_lossy(), lo.y.to_f64_lossy());
    let f64_disks: Vec<(f64, f64, f64)> = disks
        .iter()
        .map(|d| {
            (
                d.center.x.to_f64_lossy(),
                d.center.y.to_f64_lossy(),
                d.radius_sq.to_f64_lossy(),
            )
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let x = x0 + w * rng.random::<f64>();
        let y = y0 + h * rng.random::<f64>();
        if f64_disks
            .iter()
            .any(|&(cx, cy, r2)| (x - cx) * (x - cx) + (y - cy) * (y - cy) < r2)
        {
            hits += 1;
        }
    }
    let box_area = w * h;
    let p = hits as f64 / samples as f64;
    Ok(PhiEstimate {
        value: T::lit(box_area * p),
        std_error: T::lit(box_area * (p * (1.0 - p) / samples as f64).sqrt()),
    })
}

/// Area of a union of disks.
pub fn union_area<T: Real>(disks: &[Disk<T>]) -> T {
    match disks.first() {
        Some(d) => union_area_about(disks, d.center),
        None => T::zero(),
    }
}

/// Union area evaluated in coordinates centered at `origin`, which keeps
/// the Green's-theorem terms small for flowers far from the global origin.
pub fn union_area_about<T: Real>(disks: &[Disk<T>], origin: Point2<T>) -> T {
    let local: Vec<Disk<T>> = disks
        .iter()
        .filter(|d| d.radius_sq > T::zero())
        .map(|d| Disk {
            center: Point2::new(d.center.x - origin.x, d.center.y - origin.y),
            radius_sq: d.radius_sq,
        })
        .collect();

    let two_pi = T::PI() + T::PI();
    let tol = T::lit(TANGENCY_TOL);
    let half = T::lit(0.5);
    let mut total = T::zero();
    let mut covered: Vec<(T, T)> = Vec::new();

    'disk: for (i, di) in local.iter().enumerate() {
        let ri = di.radius();
        covered.clear();
        for (j, dj) in local.iter().enumerate() {
            if i == j {
                continue;
            }
            let rj = dj.radius();
            let dx = dj.center.x - di.center.x;
            let dy = dj.center.y - di.center.y;
            let d = (dx * dx + dy * dy).sqrt();
            let scale = ri.max(rj);
            // disk i inside disk j (identical disks: keep the lowest index)
            if d + ri <= rj + tol * scale {
                let identical = d <= tol * scale && (ri - rj).abs() <= tol * scale;
                if !identical || j < i {
                    continue 'disk;
                }
                continue;
            }
            // disjoint, externally tangent, or j inside i
            if d >= ri + rj - tol * scale || d + rj <= ri + tol * scale {
                continue;
            }
            let phi = dy.atan2(dx);
            let cos_a = ((ri * ri + d * d - rj * rj) / (T::lit(2.0) * ri * d))
                .max(-T::one())
                .min(T::one());
            let alpha = cos_a.acos();
            covered.push((phi - alpha, phi + alpha));
        }

        let mut arcs: Vec<(T, T)> = Vec::with_capacity(covered.len() + 1);
        for &(a0, b0) in &covered {
            let mut a = a0 % two_pi;
            if a < T::zero() {
                a = a + two_pi;
            }
            let b = a + (b0 - a0);
            if b > two_pi {
                arcs.push((a, two_pi));
                arcs.push((T::zero(), b - two_pi));
            } else {
                arcs.push((a, b));
            }
        }
        arcs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));

        let mut cursor = T::zero();
        for &(a, b) in &arcs {
            if a > cursor {
                total = total + arc_term(di, ri, cursor, a);
            }
            cursor = cursor.max(b);
        }
        if cursor < two_pi {
            total = total + arc_term(di, ri, cursor, two_pi);
        }
    }
    total * half
}

/// Twice the Green's-theorem contribution `∮ x dy - y dx` of the arc of
/// disk `d` between angles `t0` and `t1`.
#[inline]
fn arc_term<T: Real>(d: &Disk<T>, r: T, t0: T, t1: T) -> T {
    let (s0, c0) = t0.sin_cos();
    let (s1, c1) = t1.sin_cos();
    r * r * (t1 - t0) + r * (d.center.x * (s1 - s0) - d.center.y * (c1 - c0))
}

/// Area of the union of triangles incident to `v` (its star).
pub fn star_area<T: Real>(t: &Triangulation<T>, v: usize) -> Result<T> {
    let pts = t.vertices();
    let mut area = T::zero();
    for f in t.incident_triangles(v)? {
        let [a, b, c] = t.triangle(f);
        let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
        area = area + ((pb.x - pa.x) * (pc.y - pa.y) - (pb.y - pa.y) * (pc.x - pa.x)) * T::lit(0.5);
    }
    Ok(area)
}
