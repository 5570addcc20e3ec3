#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use pdx_core::geom::Point2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut impl Rng, n: usize, side: f64) -> Vec<Point2<f64>> {
    (0..n)
        .map(|_| Point2::new(side * rng.random::<f64>(), side * rng.random::<f64>()))
        .collect()
}

pub fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Orientation determinant evaluated exactly over rationals.
pub fn orient_exact(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> i32 {
    let (ax, ay, bx, by, cx, cy) = (rat(a.x), rat(a.y), rat(b.x), rat(b.y), rat(c.x), rat(c.y));
    let d = (bx - &ax) * (cy - &ay) - (by - &ay) * (cx - &ax);
    sign(&d)
}

/// In-circle determinant evaluated exactly over rationals; positive when `d`
/// is inside the circle through the counterclockwise triangle `a, b, c`.
pub fn incircle_exact(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>, d: &Point2<f64>) -> i32 {
    let row = |p: &Point2<f64>| {
        let x = rat(p.x) - rat(d.x);
        let y = rat(p.y) - rat(d.y);
        let l = &x * &x + &y * &y;
        (x, y, l)
    };
    let (ax, ay, al) = row(a);
    let (bx, by, bl) = row(b);
    let (cx, cy, cl) = row(c);
    let det = &ax * (&by * &cl - &bl * &cy) - &ay * (&bx * &cl - &bl * &cx)
        + &al * (&bx * &cy - &by * &cx);
    sign(&det)
}

fn sign(v: &BigRational) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Floating-point in-circle sign with an exact fallback near zero.
pub fn incircle_checked(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>, d: &Point2<f64>) -> i32 {
    let (adx, ady) = (a.x - d.x, a.y - d.y);
    let (bdx, bdy) = (b.x - d.x, b.y - d.y);
    let (cdx, cdy) = (c.x - d.x, c.y - d.y);
    let al = adx * adx + ady * ady;
    let bl = bdx * bdx + bdy * bdy;
    let cl = cdx * cdx + cdy * cdy;
    let det =
        adx * (bdy * cl - bl * cdy) - ady * (bdx * cl - bl * cdx) + al * (bdx * cdy - bdy * cdx);
    let scale = (adx.abs() + ady.abs())
        * (bdx.abs() + bdy.abs())
        * (cdx.abs() + cdy.abs())
        * (al + bl + cl);
    if det.abs() > 1e-10 * scale {
        det.signum() as i32
    } else {
        incircle_exact(a, b, c, d)
    }
}

/// Delaunay edges by exhaustion: an edge belongs to some triangle whose
/// circumcircle holds no other point. Assumes no four points are cocircular.
pub fn brute_force_edges(pts: &[Point2<f64>]) -> BTreeSet<(usize, usize)> {
    let n = pts.len();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = match orient_exact(&pts[i], &pts[j], &pts[k]) {
                    1 => (i, j, k),
                    -1 => (i, k, j),
                    _ => continue,
                };
                let empty = (0..n)
                    .filter(|&m| m != i && m != j && m != k)
                    .all(|m| incircle_checked(&pts[a], &pts[b], &pts[c], &pts[m]) < 0);
                if empty {
                    edges.insert((i, j));
                    edges.insert((j, k));
                    edges.insert((i, k));
                }
            }
        }
    }
    edges
}

/// Voronoi cell of `v` clipped to a large box, by successive half-plane
/// intersection. Edges are tagged with the index of the point whose bisector
/// produced them, or `None` for box edges.
pub struct Cell {
    pub vertices: Vec<(f64, f64)>,
    pub sources: Vec<Option<usize>>,
}

pub fn voronoi_cell(pts: &[Point2<f64>], v: usize, bound: f64) -> Cell {
    let p = pts[v];
    let mut poly: Vec<((f64, f64), Option<usize>)> = vec![
        ((p.x - bound, p.y - bound), None),
        ((p.x + bound, p.y - bound), None),
        ((p.x + bound, p.y + bound), None),
        ((p.x - bound, p.y + bound), None),
    ];
    // visit nearer points first so the polygon shrinks quickly
    let mut order: Vec<usize> = (0..pts.len()).filter(|&u| u != v).collect();
    order.sort_by(|&a, &b| p.dist_sq(&pts[a]).total_cmp(&p.dist_sq(&pts[b])));
    for u in order {
        let q = pts[u];
        let r2 = poly
            .iter()
            .map(|((x, y), _)| (x - p.x).powi(2) + (y - p.y).powi(2))
            .fold(0.0, f64::max);
        if p.dist_sq(&q) > 4.0 * r2 {
            break;
        }
        // keep points closer to p than to q: (x - m) . (q - p) <= 0
        let (nx, ny) = (q.x - p.x, q.y - p.y);
        let (mx, my) = ((p.x + q.x) / 2.0, (p.y + q.y) / 2.0);
        let side = |(x, y): (f64, f64)| (x - mx) * nx + (y - my) * ny;
        let m = poly.len();
        let mut next = Vec::with_capacity(m + 1);
        for i in 0..m {
            let (a, tag) = poly[i];
            let (b, _) = poly[(i + 1) % m];
            let (sa, sb) = (side(a), side(b));
            if sa <= 0.0 {
                next.push((a, tag));
            }
            if (sa <= 0.0) != (sb <= 0.0) {
                let t = sa / (sa - sb);
                let x = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
                if sa <= 0.0 {
                    next.push((x, Some(u)));
                } else {
                    next.push((x, tag));
                }
            }
        }
        poly = next;
    }
    Cell {
        vertices: poly.iter().map(|x| x.0).collect(),
        sources: poly.iter().map(|x| x.1).collect(),
    }
}

/// Degree of `v` as the number of distinct bisector edges of its cell, and
/// whether the cell is bounded by bisectors alone.
pub fn oracle_degree(pts: &[Point2<f64>], v: usize) -> (usize, bool) {
    let c = voronoi_cell(pts, v, 1e4);
    let set: BTreeSet<usize> = c.sources.iter().flatten().copied().collect();
    (set.len(), c.sources.iter().all(Option::is_some))
}

/// Whether every empty circle through `v` and two neighbors lies strictly
/// inside the box `[lo, hi]^2`, using the cell's vertices as centers.
pub fn oracle_flower_inside(pts: &[Point2<f64>], v: usize, lo: f64, hi: f64) -> bool {
    let c = voronoi_cell(pts, v, 1e4);
    if c.sources.iter().any(Option::is_none) {
        return false;
    }
    let p = pts[v];
    c.vertices.iter().all(|&(x, y)| {
        let r = ((x - p.x).powi(2) + (y - p.y).powi(2)).sqrt();
        x - r > lo && x + r < hi && y - r > lo && y + r < hi
    })
}

pub fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}
