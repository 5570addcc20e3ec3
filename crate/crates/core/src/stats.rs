//! Degree statistics restricted to a window: maxima, exceedance counts, the
//! grid subdivision with its coverage event, clusters, and empirical laws of
//! the typical degree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::delaunay::Triangulation;
use crate::error::{domain, Error, Result};
use crate::geom::{circumdisk_unchecked, Point2};
use crate::sampling::{Sample, Window};

/// Closed axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub lo: Point2<f64>,
    pub hi: Point2<f64>,
}

impl Region {
    pub fn new(lo: Point2<f64>, hi: Point2<f64>) -> Result<Self> {
        if !(lo.x <= hi.x && lo.y <= hi.y) {
            return domain(format!("region corners out of order: {lo:?} {hi:?}"));
        }
        Ok(Self { lo, hi })
    }

    /// Square of side `side` centered at `c`.
    pub fn centered(c: Point2<f64>, side: f64) -> Result<Self> {
        let h = side / 2.0;
        Self::new(Point2::new(c.x - h, c.y - h), Point2::new(c.x + h, c.y + h))
    }

    pub fn core(window: &Window) -> Self {
        Self {
            lo: Point2::new(0.0, 0.0),
            hi: Point2::new(window.side(), window.side()),
        }
    }

    #[inline]
    pub fn contains(&self, p: &Point2<f64>) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }

    pub fn contains_region(&self, other: &Region) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    pub fn area(&self) -> f64 {
        (self.hi.x - self.lo.x) * (self.hi.y - self.lo.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub vertex: usize,
    pub degree: u32,
    pub in_core_window: bool,
    /// The vertex's flower lies strictly inside the padded box, so its
    /// degree is the same as in the unrestricted process.
    pub boundary_safe: bool,
}

/// Per-vertex safety: not on the hull, and every incident circumdisk lies
/// strictly inside `bounds`.
pub fn boundary_safe_flags(t: &Triangulation<f64>, bounds: &Region) -> Vec<bool> {
    let pts = t.vertices();
    let mut safe: Vec<bool> = t.hull_flags().iter().map(|&h| !h).collect();
    for tri in t.triangles() {
        let [a, b, c] = tri.map(|v| v as usize);
        let d = circumdisk_unchecked(&pts[a], &pts[b], &pts[c]);
        let r = d.radius();
        let inside = d.center.x - r > bounds.lo.x
            && d.center.x + r < bounds.hi.x
            && d.center.y - r > bounds.lo.y
            && d.center.y + r < bounds.hi.y;
        if !inside {
            safe[a] = false;
            safe[b] = false;
            safe[c] = false;
        }
    }
    safe
}

/// Degrees of a triangulated sample together with each vertex's position.
#[derive(Debug, Clone)]
pub struct DegreeField {
    core: Region,
    points: Vec<Point2<f64>>,
    records: Vec<DegreeRecord>,
}

impl DegreeField {
    pub fn new(t: &Triangulation<f64>, window: &Window) -> Self {
        let lo = -window.pad();
        let hi = window.side() + window.pad();
        let padded = Region {
            lo: Point2::new(lo, lo),
            hi: Point2::new(hi, hi),
        };
        let safe = boundary_safe_flags(t, &padded);
        let core = Region::core(window);
        let points = t.vertices().to_vec();
        let records = points
            .iter()
            .enumerate()
            .map(|(v, p)| DegreeRecord {
                vertex: v,
                degree: t.degree_unchecked(v) as u32,
                in_core_window: core.contains(p),
                boundary_safe: safe[v],
            })
            .collect();
        Self {
            core,
            points,
            records,
        }
    }

    pub fn records(&self) -> &[DegreeRecord] {
        &self.records
    }

    pub fn core(&self) -> &Region {
        &self.core
    }

    /// Core-window vertices whose degree could not be certified.
    pub fn unsafe_core_count(&self) -> u64 {
        self.records
            .iter()
            .filter(|r| r.in_core_window && !r.boundary_safe)
            .count() as u64
    }

    fn counted<'a>(&'a self, region: &'a Region) -> Result<impl Iterator<Item = u32> + 'a> {
        if !self.core.contains_region(region) {
            return domain(format!("region {region:?} is not inside the core window"));
        }
        Ok(self
            .records
            .iter()
            .zip(&self.points)
            .filter(move |(r, p)| r.boundary_safe && region.contains(p))
            .map(|(r, _)| r.degree))
    }

    /// Largest certified degree in `region`; `None` stands for −∞.
    pub fn max_degree(&self, region: &Region) -> Result<Option<u32>> {
        Ok(self.counted(region)?.max())
    }

    /// Number of certified vertices in `region` with degree at least `k`.
    pub fn exceedance_count(&self, region: &Region, k: u32) -> Result<u64> {
        Ok(self.counted(region)?.filter(|&d| d >= k).count() as u64)
    }

    /// 1 if at least `m` certified vertices in `region` reach degree `k`.
    pub fn cluster_count(&self, region: &Region, k: u32, m: u64) -> Result<u64> {
        if m < 1 {
            return domain("cluster size must be at least 1");
        }
        Ok((self.exceedance_count(region, k)? >= m) as u64)
    }

    /// Exceedance counts of every grid cell in one pass, row-major.
    pub fn cell_exceedances(&self, g: &GridSubdivision, k: u32) -> Vec<u64> {
        let n = g.n_cells_per_side;
        let mut out = vec![0u64; n * n];
        for (r, p) in self.records.iter().zip(&self.points) {
            if r.boundary_safe && r.degree >= k {
                if let Some([i, j]) = g.cell_of(p) {
                    out[j * n + i] += 1;
                }
            }
        }
        out
    }

    /// Certified core-window vertices.
    pub fn pmf_records(&self) -> impl Iterator<Item = &DegreeRecord> {
        self.records
            .iter()
            .filter(|r| r.in_core_window && r.boundary_safe)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSubdivision {
    pub n_cells_per_side: usize,
    pub alpha: f64,
    pub cell_side: f64,
    pub dim: u32,
    /// Cells farther apart than this (in the max metric) are treated as
    /// independent.
    pub dependence_range: u32,
}

pub fn subdivide(window: &Window, alpha: f64) -> Result<GridSubdivision> {
    if !(alpha > 2.0) {
        return domain(format!("alpha must exceed 2, got {alpha}"));
    }
    let rho = window.rho();
    let d = window.dim();
    let cells = (rho / (alpha * rho.ln())).powf(1.0 / d as f64);
    if !(cells >= 1.0) {
        return domain(format!("rho = {rho} too small for alpha = {alpha}"));
    }
    let n = cells.floor() as usize;
    Ok(GridSubdivision {
        n_cells_per_side: n,
        alpha,
        cell_side: window.side() / n as f64,
        dim: d,
        dependence_range: 4 * ((d as f64).sqrt().floor() as u32 + 1),
    })
}

impl GridSubdivision {
    /// Zero-based cell of a core-window point.
    pub fn cell_of(&self, p: &Point2<f64>) -> Option<[usize; 2]> {
        let side = self.cell_side * self.n_cells_per_side as f64;
        if !(p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side) {
            return None;
        }
        let last = self.n_cells_per_side - 1;
        let i = ((p.x / self.cell_side) as usize).min(last);
        let j = ((p.y / self.cell_side) as usize).min(last);
        Some([i, j])
    }

    pub fn cell_region(&self, c: [usize; 2]) -> Region {
        let s = self.cell_side;
        Region {
            lo: Point2::new(c[0] as f64 * s, c[1] as f64 * s),
            hi: Point2::new((c[0] + 1) as f64 * s, (c[1] + 1) as f64 * s),
        }
    }

    pub fn num_cells(&self) -> usize {
        self.n_cells_per_side.pow(2)
    }
}

pub fn cell_distance(a: [usize; 2], b: [usize; 2]) -> usize {
    a[0].abs_diff(b[0]).max(a[1].abs_diff(b[1]))
}

/// Whether every grid cell holds at least one sample point.
pub fn e_rho_holds(sample: &Sample, g: &GridSubdivision) -> bool {
    let mut hit = vec![false; g.num_cells()];
    let mut missing = hit.len();
    for p in &sample.points {
        if let Some([i, j]) = g.cell_of(p) {
            let c = &mut hit[j * g.n_cells_per_side + i];
            if !*c {
                *c = true;
                missing -= 1;
                if missing == 0 {
                    return true;
                }
            }
        }
    }
    missing == 0
}

/// Degree counts. Merging is associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: BTreeMap<u32, u64>,
    pub total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, k: u32) {
        self.add_n(k, 1);
    }

    pub fn add_n(&mut self, k: u32, n: u64) {
        if n > 0 {
            *self.counts.entry(k).or_insert(0) += n;
            self.total += n;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&k, &n) in &other.counts {
            self.add_n(k, n);
        }
    }

    pub fn count(&self, k: u32) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn pmf(&self, k: u32) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.count(k) as f64 / self.total as f64
    }

    /// Empirical `P(X >= k)`.
    pub fn tail(&self, k: u32) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts.range(k..).map(|(_, &n)| n).sum::<u64>() as f64 / self.total as f64
    }

    /// Binomial standard error of `pmf(k)`.
    pub fn std_error(&self, k: u32) -> f64 {
        binomial_se(self.pmf(k), self.total)
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return f64::NAN;
        }
        let s: f64 = self.counts.iter().map(|(&k, &n)| k as f64 * n as f64).sum();
        s / self.total as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let s: f64 = self
            .counts
            .iter()
            .map(|(&k, &n)| (k as f64 - m).powi(2) * n as f64)
            .sum();
        s / self.total as f64
    }

    pub fn min(&self) -> Option<u32> {
        self.counts.keys().next().copied()
    }

    pub fn max(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }

    /// Largest value observed at least `hits` times.
    pub fn largest_with_hits(&self, hits: u64) -> Option<u32> {
        self.counts
            .iter()
            .rev()
            .find(|(_, &n)| n >= hits)
            .map(|(&k, _)| k)
    }
}

pub fn binomial_se(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Histogram of certified core-window degrees.
pub fn empirical_pmf<'a>(records: impl IntoIterator<Item = &'a DegreeRecord>) -> Result<Histogram> {
    let mut h = Histogram::new();
    for r in records {
        if r.in_core_window && r.boundary_safe {
            h.add(r.degree);
        }
    }
    if h.total == 0 {
        return Err(Error::Domain("no certified core-window vertices".into()));
    }
    Ok(h)
}

/// `-ln p / (k ln k)`, the normalized decay exponent of a pmf value.
pub fn decay_exponent(k: u32, p: f64) -> f64 {
    let k = k as f64;
    -p.ln() / (k * k.ln())
}
