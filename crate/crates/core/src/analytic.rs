//! Tail model of the typical degree and the predictors built on it.
//!
//! Probabilities are kept as logarithms: `ln q(k)` for the pmf and
//! `h(k) = -ln G(k)` for the tail `G(k) = P(D > k)`. The tail is extended to
//! real arguments by linear interpolation of `h`, and the predictor of the
//! maximal degree in a window of volume `rho` is read off the inverse.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::flowers::union_area;
use crate::geom::{circumdisk_unchecked, incircle, orient2d, Point2, Sign};
use crate::scalar::Real;
use crate::stats::Histogram;

pub const HILHORST_C: f64 = 0.34;
pub const DEFAULT_K_MIN: u32 = 10;
/// Last index tabulated for closed-form sources.
pub const K_TABLE: u32 = 400;

/// Unnormalized large-k pmf of the planar typical degree,
/// `(c / 4π²) (8π²)^k / (2k)!`, as a natural logarithm.
pub fn hilhorst_ln_pmf(k: u32, c: f64) -> Result<f64> {
    if k < 3 {
        return domain(format!("pmf is defined for k >= 3, got {k}"));
    }
    if !(c > 0.0) {
        return domain(format!("constant must be positive, got {c}"));
    }
    let pi2 = std::f64::consts::PI.powi(2);
    let k = k as f64;
    Ok((c / (4.0 * pi2)).ln() + k * (8.0 * pi2).ln() - ln_gamma(2.0 * k + 1.0))
}

pub fn hilhorst_pmf(k: u32) -> Result<f64> {
    Ok(hilhorst_ln_pmf(k, HILHORST_C)?.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PmfSource {
    Hilhorst {
        c: f64,
    },
    Empirical(Histogram),
    /// Heuristic envelope `q(k) = c^k k^(-2k/(d-1))`.
    Parametric {
        c: f64,
    },
}

impl PmfSource {
    pub fn hilhorst() -> Self {
        PmfSource::Hilhorst { c: HILHORST_C }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypicalDegreeModel<T> {
    pub dim: u32,
    pub k_min: u32,
    pub source: PmfSource,
    ln_q: Vec<T>,
    ln_g: Vec<T>,
}

impl<T: Real> TypicalDegreeModel<T> {
    pub fn build(source: PmfSource, dim: u32) -> Result<Self> {
        Self::build_with(source, dim, DEFAULT_K_MIN)
    }

    pub fn hilhorst() -> Self {
        Self::build(PmfSource::hilhorst(), 2).expect("default planar model")
    }

    pub fn build_with(source: PmfSource, dim: u32, k_min: u32) -> Result<Self> {
        if dim < 2 {
            return domain(format!("dimension must be at least 2, got {dim}"));
        }
        if k_min < 3 {
            return domain(format!("k_min must be at least 3, got {k_min}"));
        }
        let ln_q: Vec<f64> = match &source {
            PmfSource::Hilhorst { c } => {
                if dim != 2 {
                    return domain("the closed-form pmf is planar only");
                }
                (k_min..=K_TABLE)
                    .map(|k| hilhorst_ln_pmf(k, *c))
                    .collect::<Result<Vec<_>>>()?
            }
            PmfSource::Parametric { c } => {
                if !(*c > 0.0) {
                    return domain(format!("constant must be positive, got {c}"));
                }
                let e = 2.0 / (dim as f64 - 1.0);
                (k_min..=K_TABLE)
                    .map(|k| {
                        let k = k as f64;
                        k * c.ln() - e * k * k.ln()
                    })
                    .collect()
            }
            PmfSource::Empirical(h) => {
                if h.total == 0 {
                    return Err(Error::ModelBuild("empty histogram".into()));
                }
                let last = match h.max() {
                    Some(m) if m > k_min => m,
                    _ => {
                        return Err(Error::ModelBuild(format!(
                            "histogram has no mass above k_min = {k_min}"
                        )))
                    }
                };
                let n = h.total as f64;
                (k_min..=last)
                    .map(|k| (h.count(k) as f64 / n).ln())
                    .collect()
            }
        };
        for (i, w) in ln_q.windows(2).enumerate() {
            if !(w[1] < w[0]) || !w[1].is_finite() {
                return Err(Error::ModelBuild(format!(
                    "pmf not strictly decreasing and positive at k = {} (ln q = {} then {})",
                    k_min as usize + i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        if !ln_q[0].is_finite() {
            return Err(Error::ModelBuild(format!(
                "pmf vanishes at k_min = {k_min}"
            )));
        }
        // G(k) = sum_{j > k} q(j), accumulated from the far end in log space
        let mut ln_g = vec![f64::NEG_INFINITY; ln_q.len()];
        let mut acc = f64::NEG_INFINITY;
        for i in (0..ln_q.len()).rev() {
            ln_g[i] = acc;
            acc = log_add(acc, ln_q[i]);
        }
        // drop indices whose tail is empty or lost to truncation
        let keep = match &source {
            PmfSource::Empirical(_) => ln_g.iter().take_while(|g| g.is_finite()).count(),
            _ => ln_g.len().saturating_sub(8),
        };
        if keep < 2 {
            return Err(Error::ModelBuild("tail too short to interpolate".into()));
        }
        let to_t = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        Ok(Self {
            dim,
            k_min,
            source,
            ln_q: to_t(&ln_q[..keep]),
            ln_g: to_t(&ln_g[..keep]),
        })
    }

    /// Largest `k` at which the tail is tabulated.
    pub fn k_max(&self) -> u32 {
        self.k_min + self.ln_g.len() as u32 - 1
    }

    fn index(&self, k: u32) -> Result<usize> {
        if k < self.k_min || k > self.k_max() {
            return domain(format!(
                "k = {k} outside model range [{}, {}]",
                self.k_min,
                self.k_max()
            ));
        }
        Ok((k - self.k_min) as usize)
    }

    pub fn ln_q(&self, k: u32) -> Result<T> {
        Ok(self.ln_q[self.index(k)?])
    }

    pub fn q(&self, k: u32) -> Result<T> {
        Ok(self.ln_q(k)?.exp())
    }

    pub fn ln_g(&self, k: u32) -> Result<T> {
        Ok(self.ln_g[self.index(k)?])
    }

    /// `G(k) = P(D > k)`.
    pub fn g(&self, k: u32) -> Result<T> {
        Ok(self.ln_g(k)?.exp())
    }

    pub fn interpolate(&self) -> InterpolatedTail<T> {
        InterpolatedTail {
            k_min: self.k_min,
            h: self.ln_g.iter().map(|&g| -g).collect(),
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `h(k) = -ln G(k)` on integers, extended piecewise linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolatedTail<T> {
    pub k_min: u32,
    h: Vec<T>,
}

impl<T: Real> InterpolatedTail<T> {
    pub fn x_max(&self) -> T {
        T::lit((self.k_min as usize + self.h.len() - 1) as f64)
    }

    pub fn x_min(&self) -> T {
        T::lit(self.k_min as f64)
    }

    pub fn h_at(&self, k: u32) -> Option<T> {
        k.checked_sub(self.k_min)
            .and_then(|i| self.h.get(i as usize).copied())
    }

    pub fn h_c(&self, x: T) -> Result<T> {
        if !(x >= self.x_min() && x <= self.x_max()) {
            return domain(format!(
                "x = {x} outside interpolation range [{}, {}]",
                self.x_min(),
                self.x_max()
            ));
        }
        let u = x - self.x_min();
        let i = u.floor().to_usize().unwrap_or(0).min(self.h.len() - 2);
        let f = u - T::lit(i as f64);
        Ok(self.h[i] + f * (self.h[i + 1] - self.h[i]))
    }

    pub fn g_c(&self, x: T) -> Result<T> {
        Ok((-self.h_c(x)?).exp())
    }

    /// Solves `h_c(x) = level` by bisection.
    pub fn h_inverse(&self, level: T) -> Result<T> {
        let (lo_h, hi_h) = (self.h[0], self.h[self.h.len() - 1]);
        if !(level >= lo_h && level <= hi_h) {
            return domain(format!(
                "tail level {level} outside model range [{lo_h}, {hi_h}]"
            ));
        }
        let (mut lo, mut hi) = (self.x_min(), self.x_max());
        let tol = T::solve_tol(hi) * T::lit(1e-3);
        for _ in 0..200 {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi || hi - lo <= tol {
                break;
            }
            if self.h_c(mid)? < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // settle on the endpoint whose value matches best
        let (elo, ehi) = ((self.h_c(lo)? - level).abs(), (self.h_c(hi)? - level).abs());
        Ok(if ehi <= elo { hi } else { lo })
    }

    /// `G_c^{-1}(p)` for `0 < p <= G(k_min)`.
    pub fn gc_inverse(&self, p: T) -> Result<T> {
        if !(p > T::zero()) {
            return domain(format!("probability must be positive, got {p}"));
        }
        self.h_inverse(-p.ln())
    }

    /// `A_rho = G_c^{-1}(1/rho)`. `rho` stays in `f64` so that very large
    /// windows remain representable for narrow scalar types.
    pub fn a_rho(&self, rho: f64) -> Result<T> {
        if !(rho > 0.0) || !rho.is_finite() {
            return domain(format!("rho must be positive and finite, got {rho}"));
        }
        self.h_inverse(T::lit(rho.ln()))
    }

    /// `I_rho = floor(A_rho + 1/2)`.
    pub fn predictor_i(&self, rho: f64) -> Result<i64> {
        let a = self.a_rho(rho)?;
        let x = a + T::lit(0.5);
        Ok((x + T::solve_tol(x))
            .floor()
            .to_i64()
            .expect("finite predictor"))
    }

    /// `J_rho = I_rho + 1 - l_d`.
    pub fn predictor_j(&self, rho: f64, d: u32) -> Result<i64> {
        Ok(self.predictor_i(rho)? + 1 - l_d(d)? as i64)
    }

    /// Left endpoint of `{rho : I_rho = i}`, i.e. `1 / G_c(i - 1/2)`.
    pub fn one_value_window(&self, i: u32) -> Result<f64> {
        if i < self.k_min + 1 {
            return domain(format!("i must be at least {}, got {i}", self.k_min + 1));
        }
        let h = self.h_c(T::lit(i as f64 - 0.5))?;
        Ok(h.to_f64_lossy().exp())
    }

    /// Evaluates `rho G(I+1)` and `rho G(I-1-l)` for `l = 0..=3`.
    pub fn tail_scaling(&self, rho: f64) -> Result<TailScaling> {
        let i = self.predictor_i(rho)?;
        let at = |k: i64| -> Result<f64> {
            let h = u32::try_from(k)
                .ok()
                .and_then(|k| self.h_at(k))
                .ok_or_else(|| Error::Domain(format!("G({k}) outside model range")))?;
            Ok((rho.ln() - h.to_f64_lossy()).exp())
        };
        let mut below = [0.0; 4];
        for (l, b) in below.iter_mut().enumerate() {
            *b = at(i - 1 - l as i64)?;
        }
        Ok(TailScaling {
            rho,
            i_rho: i,
            above: at(i + 1)?,
            below,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailScaling {
    pub rho: f64,
    pub i_rho: i64,
    /// `rho G(I+1)`.
    pub above: f64,
    /// `rho G(I-1-l)` for `l = 0, 1, 2, 3`.
    pub below: [f64; 4],
}

/// Width of the concentration window in dimension `d`: `floor((d+3)/2)`.
pub fn l_d(d: u32) -> Result<u32> {
    if d < 2 {
        return domain(format!("dimension must be at least 2, got {d}"));
    }
    Ok((d + 3) / 2)
}

/// `(d-1)/2 * ln rho / ln ln rho`, for `rho > e^e`.
pub fn asymptotic_max_degree(rho: f64, d: u32) -> Result<f64> {
    if d < 2 {
        return domain(format!("dimension must be at least 2, got {d}"));
    }
    let e = std::f64::consts::E;
    if !(rho > e.powf(e)) || !rho.is_finite() {
        return domain(format!("rho must exceed e^e, got {rho}"));
    }
    let l = rho.ln();
    Ok((d as f64 - 1.0) / 2.0 * l / l.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McIntegral {
    pub k: u32,
    pub radius: f64,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// Hits with a coordinate within 5% of the cube boundary.
    pub shell_hits: u64,
    /// More than 0.1% of hits sit in the shell; the cube may clip the support.
    pub shell_warning: bool,
}

/// Monte-Carlo evaluation of `P(D = k)` as the volume of the `k`-tuples in
/// convex position around the origin whose flower has area at most 1.
pub fn integral_pmf_mc(k: u32, radius: f64, n: u64, seed: u64) -> Result<McIntegral> {
    use rand::{Rng, SeedableRng};

    if !(3..=5).contains(&k) {
        return domain(format!("k must be 3, 4 or 5, got {k}"));
    }
    if n == 0 {
        return domain("Monte-Carlo integral needs at least one sample");
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return domain(format!("radius must be positive, got {radius}"));
    }
    let k = k as usize;
    // a neighbor at distance r forces a petal of area >= π r² / 4
    let reach_sq = 4.0 / std::f64::consts::PI;
    let shell = 0.95 * radius;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ys = [Point2::new(0.0, 0.0); 5];
    let (mut hits, mut shell_hits) = (0u64, 0u64);
    'sample: for _ in 0..n {
        for y in ys.iter_mut().take(k) {
            let p = Point2::new(
                radius * (2.0 * rng.random::<f64>() - 1.0),
                radius * (2.0 * rng.random::<f64>() - 1.0),
            );
            if p.x * p.x + p.y * p.y > reach_sq {
                continue 'sample;
            }
            *y = p;
        }
        if flower_area_if_convex(&mut ys[..k]).is_some_and(|a| a <= 1.0) {
            hits += 1;
            if ys[..k].iter().any(|p| p.x.abs().max(p.y.abs()) >= shell) {
                shell_hits += 1;
            }
        }
    }
    let vol = (2.0 * radius).powi(2 * k as i32);
    let p = hits as f64 / n as f64;
    Ok(McIntegral {
        k: k as u32,
        radius,
        samples: n,
        hits,
        estimate: vol * p,
        std_error: vol * (p * (1.0 - p) / n as f64).sqrt(),
        shell_hits,
        shell_warning: shell_hits as f64 > 1e-3 * hits as f64,
    })
}

/// Area of the flower of the origin in `Del({0} ∪ ys)` when the origin is an
/// interior vertex adjacent to every point of `ys`; `None` otherwise.
/// Reorders `ys` by angle.
pub fn flower_area_if_convex(ys: &mut [Point2<f64>]) -> Option<f64> {
    let o = Point2::new(0.0, 0.0);
    ys.sort_by(|a, b| a.y.atan2(a.x).total_cmp(&b.y.atan2(b.x)));
    let m = ys.len();
    for i in 0..m {
        let (a, b) = (ys[i], ys[(i + 1) % m]);
        // consecutive neighbors must turn left strictly, else the origin is
        // on the hull
        if orient2d(&o, &a, &b) != Sign::Positive {
            return None;
        }
        for (j, p) in ys.iter().enumerate() {
            if j != i && j != (i + 1) % m && incircle(&o, &a, &b, p).ok()? != Sign::Negative {
                return None;
            }
        }
    }
    let petals: Vec<_> = (0..m)
        .map(|i| circumdisk_unchecked(&o, &ys[i], &ys[(i + 1) % m]))
        .collect();
    Some(union_area(&petals))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_domain() {
        assert!(hilhorst_pmf(2).is_err());
        assert!(hilhorst_pmf(3).is_ok());
    }

    #[test]
    fn dimension_offsets() {
        assert_eq!(l_d(2).unwrap(), 2);
        assert_eq!(l_d(3).unwrap(), 3);
        assert_eq!(l_d(4).unwrap(), 3);
        assert!(l_d(1).is_err());
    }

    #[test]
    fn asymptotic_domain() {
        let e = std::f64::consts::E;
        assert!(asymptotic_max_degree(e.powf(e), 2).is_err());
        let a2 = asymptotic_max_degree(1e6, 2).unwrap();
        let a3 = asymptotic_max_degree(1e6, 3).unwrap();
        assert!((a3 - 2.0 * a2).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_anchored() {
        let m = TypicalDegreeModel::<f64>::hilhorst();
        let t = m.interpolate();
        for k in 10..30 {
            let g = m.g(k).unwrap();
            assert!((t.g_c(k as f64).unwrap() / g - 1.0).abs() < 1e-12);
            let mid = t.g_c(k as f64 + 0.5).unwrap();
            let geo = (g * m.g(k + 1).unwrap()).sqrt();
            assert!((mid / geo - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_tail_must_decrease() {
        let mut h = Histogram::new();
        for (k, n) in [(10, 50), (11, 20), (12, 30), (13, 1)] {
            h.add_n(k, n);
        }
        assert!(matches!(
            TypicalDegreeModel::<f64>::build(PmfSource::Empirical(h), 2),
            Err(Error::ModelBuild(_))
        ));
    }

    #[test]
    fn convex_position_detection() {
        let mut tri = [
            Point2::new(0.5, 0.0),
            Point2::new(-0.25, 0.4),
            Point2::new(-0.25, -0.4),
        ];
        assert!(flower_area_if_convex(&mut tri).is_some());
        let mut one_sided = [
            Point2::new(0.5, 0.1),
            Point2::new(0.5, -0.1),
            Point2::new(0.6, 0.0),
        ];
        assert!(flower_area_if_convex(&mut one_sided).is_none());
    }
}
