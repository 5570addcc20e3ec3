//! Reproducible unit-intensity Poisson samples in a padded square window.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{domain, Result};
use crate::geom::Point2;

/// The observation window `[0, side]^dim` with `side = rho^(1/dim)`, plus a
/// margin of `pad` on every side in which points are sampled but not
/// measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    rho: f64,
    dim: u32,
    side: f64,
    pad: f64,
}

impl Window {
    pub fn new(rho: f64, dim: u32, pad: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return domain(format!("rho must be positive and finite, got {rho}"));
        }
        if dim < 2 {
            return domain(format!("dimension must be at least 2, got {dim}"));
        }
        if !(pad >= 0.0) || !pad.is_finite() {
            return domain(format!("pad must be nonnegative, got {pad}"));
        }
        let side = if dim == 2 {
            rho.sqrt()
        } else {
            rho.powf(1.0 / dim as f64)
        };
        Ok(Self {
            rho,
            dim,
            side,
            pad,
        })
    }

    /// Planar window with `pad = pad_factor * sqrt(ln rho)`.
    pub fn planar(rho: f64, pad_factor: f64) -> Result<Self> {
        if !(pad_factor >= 0.0) {
            return domain(format!("pad factor must be nonnegative, got {pad_factor}"));
        }
        let pad = if rho > 1.0 {
            pad_factor * rho.ln().sqrt()
        } else {
            0.0
        };
        Self::new(rho, 2, pad)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn pad(&self) -> f64 {
        self.pad
    }

    /// Side of the sampled box including both margins.
    pub fn padded_side(&self) -> f64 {
        self.side + 2.0 * self.pad
    }

    pub fn center(&self) -> Point2<f64> {
        Point2::new(self.side / 2.0, self.side / 2.0)
    }

    /// Membership in the closed core window.
    #[inline]
    pub fn in_core(&self, p: &Point2<f64>) -> bool {
        p.x >= 0.0 && p.x <= self.side && p.y >= 0.0 && p.y <= self.side
    }

    #[inline]
    pub fn in_padded(&self, p: &Point2<f64>) -> bool {
        let (lo, hi) = (-self.pad, self.side + self.pad);
        p.x >= lo && p.x <= hi && p.y >= lo && p.y <= hi
    }
}

/// Default margin for a planar window of intensity `rho`.
pub fn default_pad(rho: f64) -> f64 {
    DEFAULT_PAD_FACTOR * rho.ln().max(0.0).sqrt()
}

pub const DEFAULT_PAD_FACTOR: f64 = 4.0;

/// One Poisson realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub window: Window,
    pub points: Vec<Point2<f64>>,
    pub seed: u64,
    pub trial_index: u64,
    /// Index of the point added at the window center, if any.
    pub palm: Option<usize>,
}

/// SplitMix64 finalizer over the pair `(seed, trial_index)`.
pub fn trial_seed(seed: u64, trial_index: u64) -> u64 {
    let mut z = seed ^ trial_index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random stream for one trial; independent of how trials are scheduled.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, trial_index))
}

/// Draws the point count, then places that many points uniformly in the
/// padded box.
pub fn sample_poisson(window: Window, seed: u64, trial_index: u64) -> Result<Sample> {
    if window.dim != 2 {
        return domain("only planar windows can be sampled");
    }
    if window.rho < 1.0 {
        return domain(format!("rho must be at least 1, got {}", window.rho));
    }
    let mut rng = trial_rng(seed, trial_index);
    let len = window.padded_side();
    let mean = len * len;
    let count = Poisson::new(mean)
        .map_err(|e| crate::error::Error::Domain(format!("poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let lo = -window.pad;
    let points: Vec<Point2<f64>> = (0..count)
        .map(|_| {
            let x = lo + len * rng.random::<f64>();
            let y = lo + len * rng.random::<f64>();
            Point2::new(x, y)
        })
        .collect();
    let points = bucket_rows(points, lo, len);
    Ok(Sample {
        window,
        points,
        seed,
        trial_index,
        palm: None,
    })
}

/// Reorders points by unit-area grid cell, row-major. Downstream passes
/// over the triangulation then touch memory in spatially coherent order.
fn bucket_rows(points: Vec<Point2<f64>>, lo: f64, len: f64) -> Vec<Point2<f64>> {
    let cells = (len.ceil() as usize).max(1);
    let cell = |p: &Point2<f64>| {
        let cx = (((p.x - lo) as usize).min(cells - 1)) as usize;
        let cy = (((p.y - lo) as usize).min(cells - 1)) as usize;
        cy * cells + cx
    };
    let mut start = vec![0usize; cells * cells + 1];
    for p in &points {
        start[cell(p) + 1] += 1;
    }
    for i in 1..start.len() {
        start[i] += start[i - 1];
    }
    let mut out = vec![Point2::new(0.0, 0.0); points.len()];
    for p in points {
        let c = cell(&p);
        out[start[c]] = p;
        start[c] += 1;
    }
    out
}

/// Appends the window center as the Palm point.
pub fn add_origin(mut sample: Sample) -> Sample {
    sample.palm = Some(sample.points.len());
    sample.points.push(sample.window.center());
    sample
}
