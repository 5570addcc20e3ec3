//! Planar Delaunay triangulation by incremental insertion.
//!
//! Points are inserted in biased randomized rounds, each round ordered along a
//! Hilbert curve over a 2¹⁶ × 2¹⁶ grid of the bounding box, and located by a
//! visibility walk from the previously created triangle. The convex hull is
//! closed off with triangles incident to a vertex at infinity, so insertion
//! outside the hull is the same cavity retriangulation as insertion inside.
//!
//! Cocircular ties are broken with [`incircle_perturbed`], which makes the
//! output unique for a given input labelling.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{incircle_perturbed, Point2, Sign};
use crate::scalar::Real;

pub(crate) const NONE: u32 = u32::MAX;
const GHOST: u32 = u32::MAX - 1;

#[inline]
fn next(e: u32) -> u32 {
    if e % 3 == 2 {
        e - 2
    } else {
        e + 1
    }
}

#[inline]
fn prev(e: u32) -> u32 {
    if e % 3 == 0 {
        e + 2
    } else {
        e - 1
    }
}

/// Delaunay graph of a finite planar point set.
///
/// Half-edge `e = 3t + i` runs from corner `i` of triangle `t` to corner
/// `i + 1`; triangles are counterclockwise. Hull edges have no twin.
#[derive(Debug, Clone)]
pub struct Triangulation<T> {
    vertices: Vec<Point2<T>>,
    triangles: Vec<[u32; 3]>,
    twins: Vec<u32>,
    vertex_edge: Vec<u32>,
    hull: Vec<bool>,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
}

impl<T: Real> Triangulation<T> {
    /// Triangulates `points`. Vertex `i` of the result is `points[i]`.
    pub fn build(points: &[Point2<T>]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Degenerate(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        if points.len() >= GHOST as usize {
            return Err(Error::Domain("too many points".into()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("point {i} is not finite")));
        }
        let order = insertion_order(points);
        let mut b = Builder::new(points, order);
        let rest = b.seed()?;
        for i in rest {
            b.insert(i)?;
        }
        Ok(b.finish())
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Finite triangles, counterclockwise.
    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbor indices of `v`.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check(v)?;
        Ok(self.neighbors(v).len())
    }

    /// Degree without bounds checking beyond the slice index panic.
    #[inline]
    pub fn degree_unchecked(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    pub fn is_hull(&self, v: usize) -> bool {
        self.hull[v]
    }

    pub fn hull_flags(&self) -> &[bool] {
        &self.hull
    }

    /// Undirected edges as `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Triangles incident to `v` in counterclockwise order. For a hull
    /// vertex the fan starts at its outgoing hull edge.
    pub fn incident_triangles(&self, v: usize) -> Result<Vec<usize>> {
        self.check(v)?;
        let start = self.vertex_edge[v];
        let mut out = Vec::with_capacity(8);
        let mut e = start;
        loop {
            out.push((e / 3) as usize);
            let t = self.twins[prev(e) as usize];
            if t == NONE || t == start {
                break;
            }
            e = t;
        }
        Ok(out)
    }

    /// Vertex indices of triangle `t`.
    pub fn triangle(&self, t: usize) -> [usize; 3] {
        let [a, b, c] = self.triangles[t];
        [a as usize, b as usize, c as usize]
    }

    fn check(&self, v: usize) -> Result<()> {
        if v >= self.vertices.len() {
            Err(Error::Index {
                index: v,
                len: self.vertices.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Twin of half-edge `e`, if it is interior.
    pub fn twin(&self, e: usize) -> Option<usize> {
        let t = self.twins[e];
        (t != NONE).then_some(t as usize)
    }
}

fn hilbert_key(mut x: u32, mut y: u32) -> u32 {
    const N: u32 = 1 << 16;
    let mut d: u32 = 0;
    let mut s = N / 2;
    while s > 0 {
        let rx = u32::from(x & s != 0);
        let ry = u32::from(y & s != 0);
        d = d.wrapping_add(s.wrapping_mul(s).wrapping_mul((3 * rx) ^ ry));
        if ry == 0 {
            if rx == 1 {
                x = N - 1 - x;
                y = N - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s >>= 1;
    }
    d
}

/// Biased randomized insertion order with Hilbert-sorted rounds.
fn insertion_order<T: Real>(points: &[Point2<T>]) -> Vec<u32> {
    let n = points.len();
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in points {
        let (x, y) = (p.x.to_f64_lossy(), p.y.to_f64_lossy());
        lo_x = lo_x.min(x);
        lo_y = lo_y.min(y);
        hi_x = hi_x.max(x);
        hi_y = hi_y.max(y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(f64::MIN_POSITIVE);
    let scale = 65535.0 / span;

    let mut keyed: Vec<u64> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let gx = ((p.x.to_f64_lossy() - lo_x) * scale) as u32;
            let gy = ((p.y.to_f64_lossy() - lo_y) * scale) as u32;
            (u64::from(hilbert_key(gx.min(65535), gy.min(65535))) << 32) | i as u64
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15 ^ n as u64);
    keyed.shuffle(&mut rng);

    let mut end = n;
    while end > 0 {
        let start = if end <= 128 { 0 } else { end / 2 };
        keyed[start..end].sort_unstable();
        end = start;
    }
    keyed.into_iter().map(|k| k as u32).collect()
}

/// Works on a copy of the points laid out in insertion order; `orig` maps
/// back to caller indices, which also drive the tie-breaking perturbation.
struct Builder<'a, T> {
    input: &'a [Point2<T>],
    pts: Vec<Point2<T>>,
    orig: Vec<u32>,
    tri: Vec<u32>,
    twin: Vec<u32>,
    mark: Vec<u32>,
    stamp: u32,
    last: u32,
    rot: u32,
    stack: Vec<u32>,
    cavity: Vec<u32>,
    boundary: Vec<(u32, u32, u32)>,
    created: Vec<u32>,
}

impl<'a, T: Real> Builder<'a, T> {
    fn new(input: &'a [Point2<T>], order: Vec<u32>) -> Self {
        let cap = 2 * input.len() + 8;
        Self {
            input,
            pts: order.iter().map(|&i| input[i as usize]).collect(),
            orig: order,
            tri: Vec::with_capacity(3 * cap),
            twin: Vec::with_capacity(3 * cap),
            mark: Vec::with_capacity(cap),
            stamp: 0,
            last: 0,
            rot: 0,
            stack: Vec::new(),
            cavity: Vec::new(),
            boundary: Vec::new(),
            created: Vec::new(),
        }
    }

    #[inline]
    fn pt(&self, v: u32) -> &Point2<T> {
        &self.pts[v as usize]
    }

    fn dup(&self, a: u32, b: u32) -> Error {
        let (a, b) = (self.orig[a as usize], self.orig[b as usize]);
        Error::Duplicate {
            first: a.min(b) as usize,
            second: a.max(b) as usize,
        }
    }

    #[inline]
    fn is_ghost(&self, t: u32) -> bool {
        let b = 3 * t as usize;
        self.tri[b] == GHOST || self.tri[b + 1] == GHOST || self.tri[b + 2] == GHOST
    }

    fn push_tri(&mut self, v: [u32; 3]) -> u32 {
        let t = (self.tri.len() / 3) as u32;
        self.tri.extend_from_slice(&v);
        self.twin.extend_from_slice(&[NONE; 3]);
        self.mark.push(0);
        t
    }

    #[inline]
    fn link(&mut self, e: u32, f: u32) {
        self.twin[e as usize] = f;
        self.twin[f as usize] = e;
    }

    /// Creates the first triangle and its three ghosts; returns the
    /// remaining points in insertion order.
    fn seed(&mut self) -> Result<impl Iterator<Item = u32>> {
        let n = self.pts.len() as u32;
        let (a, b) = (0u32, 1u32);
        if self.pt(a) == self.pt(b) {
            return Err(self.dup(a, b));
        }
        let c = (2..n)
            .find(|&c| T::orient2d_sign(self.pt(a), self.pt(b), self.pt(c)) != Sign::Zero)
            .ok_or_else(|| Error::Degenerate("all points are collinear".into()))?;
        let cpos = c;
        let (b, c) = if T::orient2d_sign(self.pt(a), self.pt(b), self.pt(c)) == Sign::Positive {
            (b, c)
        } else {
            (c, b)
        };

        let t0 = self.push_tri([a, b, c]);
        let g0 = self.push_tri([b, a, GHOST]);
        let g1 = self.push_tri([c, b, GHOST]);
        let g2 = self.push_tri([a, c, GHOST]);
        self.link(3 * t0, 3 * g0);
        self.link(3 * t0 + 1, 3 * g1);
        self.link(3 * t0 + 2, 3 * g2);
        self.link(3 * g0 + 1, 3 * g2 + 2);
        self.link(3 * g1 + 1, 3 * g0 + 2);
        self.link(3 * g2 + 1, 3 * g1 + 2);
        self.last = t0;

        Ok((2..n).filter(move |&i| i != cpos))
    }

    fn conflict(&self, t: u32, pi: u32) -> bool {
        let b = 3 * t as usize;
        let v = [self.tri[b], self.tri[b + 1], self.tri[b + 2]];
        let p = self.pt(pi);
        if let Some(k) = v.iter().position(|&x| x == GHOST) {
            let x = self.pt(v[(k + 1) % 3]);
            let y = self.pt(v[(k + 2) % 3]);
            match T::orient2d_sign(x, y, p) {
                Sign::Positive => true,
                Sign::Negative => false,
                Sign::Zero => strictly_between(x, y, p),
            }
        } else {
            let o = &self.orig;
            incircle_perturbed(
                (self.pt(v[0]), o[v[0] as usize]),
                (self.pt(v[1]), o[v[1] as usize]),
                (self.pt(v[2]), o[v[2] as usize]),
                (p, o[pi as usize]),
            ) == Sign::Positive
        }
    }

    /// Visibility walk to a triangle whose closure contains `p`, or to the
    /// ghost triangle beyond the hull edge that `p` lies strictly outside of.
    fn locate(&mut self, pi: u32) -> Result<u32> {
        let p = *self.pt(pi);
        let mut t = self.last;
        if self.is_ghost(t) {
            let b = 3 * t;
            let k = (0..3)
                .find(|&k| self.tri[(b + k) as usize] == GHOST)
                .unwrap_or(0);
            // the edge opposite the ghost corner is finite
            let e = b + (k + 1) % 3;
            t = self.twin[e as usize] / 3;
        }
        'walk: loop {
            self.rot = if self.rot == 2 { 0 } else { self.rot + 1 };
            for i in 0..3 {
                let e = 3 * t + (self.rot + i) % 3;
                let a = self.tri[e as usize];
                let b = self.tri[next(e) as usize];
                if T::orient2d_sign(self.pt(a), self.pt(b), &p) == Sign::Negative {
                    let nt = self.twin[e as usize] / 3;
                    if self.is_ghost(nt) {
                        return Ok(nt);
                    }
                    t = nt;
                    continue 'walk;
                }
            }
            break;
        }
        for k in 0..3 {
            let v = self.tri[(3 * t + k) as usize];
            if *self.pt(v) == p {
                return Err(self.dup(v, pi));
            }
        }
        Ok(t)
    }

    fn insert(&mut self, pi: u32) -> Result<()> {
        let start = self.locate(pi)?;
        self.stamp += 1;
        let inside = 2 * self.stamp;
        let outside = inside + 1;

        self.cavity.clear();
        self.boundary.clear();
        self.stack.clear();
        self.mark[start as usize] = inside;
        self.stack.push(start);
        while let Some(t) = self.stack.pop() {
            self.cavity.push(t);
            for i in 0..3 {
                let e = 3 * t + i;
                let o = self.twin[e as usize];
                let nt = o / 3;
                let m = self.mark[nt as usize];
                if m == inside {
                    continue;
                }
                if m != outside && self.conflict(nt, pi) {
                    self.mark[nt as usize] = inside;
                    self.stack.push(nt);
                } else {
                    self.mark[nt as usize] = outside;
                    self.boundary
                        .push((self.tri[e as usize], self.tri[next(e) as usize], o));
                }
            }
        }

        self.created.clear();
        for j in 0..self.boundary.len() {
            let (u, v, o) = self.boundary[j];
            let t = if j < self.cavity.len() {
                let t = self.cavity[j];
                let b = 3 * t as usize;
                self.tri[b..b + 3].copy_from_slice(&[u, v, pi]);
                self.mark[t as usize] = 0;
                t
            } else {
                self.push_tri([u, v, pi])
            };
            self.link(3 * t, o);
            self.created.push(t);
        }
        // edge v->p of the triangle on (u, v) pairs with p->v of the one on (v, w)
        for j in 0..self.created.len() {
            let v = self.boundary[j].1;
            let k = self
                .boundary
                .iter()
                .position(|&(u, _, _)| u == v)
                .expect("cavity boundary is a closed cycle");
            let (tj, tk) = (self.created[j], self.created[k]);
            self.link(3 * tj + 1, 3 * tk + 2);
        }
        self.last = self
            .created
            .iter()
            .copied()
            .find(|&t| !self.is_ghost(t))
            .unwrap_or(self.created[0]);
        Ok(())
    }

    fn finish(self) -> Triangulation<T> {
        let ntri = self.tri.len() / 3;
        let mut remap = vec![NONE; ntri];
        let mut count = 0u32;
        for (t, slot) in remap.iter_mut().enumerate() {
            if !self.is_ghost(t as u32) {
                *slot = count;
                count += 1;
            }
        }
        let n = self.pts.len();
        let orig = &self.orig;
        let mut triangles = Vec::with_capacity(count as usize);
        let mut twins = Vec::with_capacity(3 * count as usize);
        let mut hull = vec![false; n];
        let mut vertex_edge = vec![NONE; n];
        for t in 0..ntri {
            if remap[t] == NONE {
                continue;
            }
            let b = 3 * t;
            let v = [self.tri[b], self.tri[b + 1], self.tri[b + 2]].map(|x| orig[x as usize]);
            triangles.push(v);
            for i in 0..3 {
                let o = self.twin[b + i];
                let ot = (o / 3) as usize;
                let ne = 3 * remap[t] + i as u32;
                let u = v[i] as usize;
                if remap[ot] == NONE {
                    twins.push(NONE);
                    hull[u] = true;
                    hull[v[(i + 1) % 3] as usize] = true;
                    // hull vertices start their fan at the outgoing hull edge
                    vertex_edge[u] = ne;
                } else {
                    twins.push(3 * remap[ot] + o % 3);
                    if vertex_edge[u] == NONE {
                        vertex_edge[u] = ne;
                    }
                }
            }
        }

        let mut deg = vec![0u32; n + 1];
        for (e, &tw) in twins.iter().enumerate() {
            let t = e / 3;
            let u = triangles[t][e % 3] as usize;
            deg[u] += 1;
            if tw == NONE {
                deg[triangles[t][(e + 1) % 3] as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0u32;
        for d in deg.iter().take(n) {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; acc as usize];
        for (e, &tw) in twins.iter().enumerate() {
            let t = e / 3;
            let u = triangles[t][e % 3];
            let v = triangles[t][(e + 1) % 3];
            neighbors[fill[u as usize] as usize] = v;
            fill[u as usize] += 1;
            if tw == NONE {
                neighbors[fill[v as usize] as usize] = u;
                fill[v as usize] += 1;
            }
        }
        for v in 0..n {
            insertion_sort(&mut neighbors[offsets[v] as usize..offsets[v + 1] as usize]);
        }

        Triangulation {
            vertices: self.input.to_vec(),
            triangles,
            twins,
            vertex_edge,
            hull,
            offsets,
            neighbors,
        }
    }
}

fn insertion_sort(v: &mut [u32]) {
    for i in 1..v.len() {
        let x = v[i];
        let mut j = i;
        while j > 0 && v[j - 1] > x {
            v[j] = v[j - 1];
            j -= 1;
        }
        v[j] = x;
    }
}

fn strictly_between<T: Real>(x: &Point2<T>, y: &Point2<T>, p: &Point2<T>) -> bool {
    if x.x != y.x {
        (x.x < p.x && p.x < y.x) || (y.x < p.x && p.x < x.x)
    } else {
        (x.y < p.y && p.y < y.y) || (y.y < p.y && p.y < x.y)
    }
}
