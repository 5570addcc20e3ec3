//! Monte-Carlo harness for the maximal degree.
//!
//! Every trial draws its own random stream from `(master_seed, index)`, and
//! trials are striped over worker threads by index, so results never depend
//! on how many workers ran them.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::analytic::{l_d, TypicalDegreeModel};
use crate::delaunay::Triangulation;
use crate::error::{domain, Error, Result};
use crate::report::{write_json, ResultFile};
use crate::sampling::{add_origin, sample_poisson, Window};
use crate::stats::{
    binomial_se, boundary_safe_flags, e_rho_holds, subdivide, DegreeField, Histogram, Region,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub clusters: bool,
    pub e_rho: bool,
    pub block_tail: bool,
    pub pad_check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub rho: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub alpha: f64,
    pub pad_factor: f64,
    /// Not serialized: output files are identical for any worker count.
    #[serde(skip, default = "default_workers")]
    pub workers: usize,
    pub diagnostics: Diagnostics,
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl ExperimentConfig {
    pub fn new(rho: f64, trials: u64, master_seed: u64) -> Self {
        Self {
            rho,
            trials,
            master_seed,
            alpha: 2.5,
            pad_factor: crate::sampling::DEFAULT_PAD_FACTOR,
            workers: default_workers(),
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return domain("at least one trial is required");
        }
        if !(self.alpha > 2.0) {
            return domain(format!("alpha must exceed 2, got {}", self.alpha));
        }
        if !(self.pad_factor >= 0.0) {
            return domain(format!(
                "pad factor must be nonnegative, got {}",
                self.pad_factor
            ));
        }
        if !(self.rho >= 1.0) || !self.rho.is_finite() {
            return domain(format!("rho must be at least 1, got {}", self.rho));
        }
        Ok(())
    }

    pub fn window(&self) -> Result<Window> {
        Window::planar(self.rho, self.pad_factor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_index: u64,
    /// Maximal certified degree in the core window; `None` when it is empty.
    pub delta: Option<u32>,
    pub n_points: u64,
    /// Core-window vertices whose flower leaves the padded box.
    pub n_boundary_unsafe: u64,
    /// `k -> #{x : d(x) >= k}` for `k` from `min(10, delta)` to `delta + 1`.
    pub exceedances: BTreeMap<u32, u64>,
    pub e_rho: Option<bool>,
    /// Largest count of vertices with degree `>= I_rho` in one grid cell.
    pub max_cluster: Option<u64>,
}

/// Predictors `(I, J)` for the planar window of volume `rho`, when the tail
/// model covers it.
pub fn predictors(rho: f64) -> Option<(i64, i64)> {
    let tail = TypicalDegreeModel::<f64>::hilhorst().interpolate();
    let i = tail.predictor_i(rho).ok()?;
    Some((i, i + 1 - l_d(2).ok()? as i64))
}

fn measure(config: &ExperimentConfig, index: u64) -> Result<(TrialResult, DegreeField)> {
    let window = config.window()?;
    let sample = sample_poisson(window, config.master_seed, index)?;
    let t = Triangulation::build(&sample.points)?;
    let field = DegreeField::new(&t, &window);
    let core = Region::core(&window);
    let delta = field.max_degree(&core)?;
    let mut exceedances = BTreeMap::new();
    if let Some(d) = delta {
        for k in d.min(10)..=d + 1 {
            exceedances.insert(k, 0);
        }
        for r in field.pmf_records() {
            for k in d.min(10)..=r.degree.min(d + 1) {
                *exceedances.get_mut(&k).expect("k in range") += 1;
            }
        }
    }
    let grid = if config.diagnostics.e_rho || config.diagnostics.clusters {
        Some(subdivide(&window, config.alpha)?)
    } else {
        None
    };
    let e_rho = match (&grid, config.diagnostics.e_rho) {
        (Some(g), true) => Some(e_rho_holds(&sample, g)),
        _ => None,
    };
    let max_cluster = match (&grid, config.diagnostics.clusters) {
        (Some(g), true) => {
            let k = predictors(config.rho)
                .map(|(i, _)| i.max(0) as u32)
                .or(delta)
                .unwrap_or(0);
            field.cell_exceedances(g, k).into_iter().max()
        }
        _ => None,
    };
    let result = TrialResult {
        trial_index: index,
        delta,
        n_points: sample.points.len() as u64,
        n_boundary_unsafe: field.unsafe_core_count(),
        exceedances,
        e_rho,
        max_cluster,
    };
    Ok((result, field))
}

fn trial_error(index: u64, e: Error) -> Error {
    Error::Trial {
        index,
        source: Box::new(e),
    }
}

pub fn run_trial(config: &ExperimentConfig, trial_index: u64) -> Result<TrialResult> {
    config.validate()?;
    measure(config, trial_index)
        .map(|(r, _)| r)
        .map_err(|e| trial_error(trial_index, e))
}

/// Evaluates `f` on `0..n` with indices striped over `workers` threads.
/// Stops early after the first failure; the returned vector is ordered by
/// index and holds `None` for indices that were skipped.
pub fn parallel_map<R, F>(n: u64, workers: usize, f: F) -> Vec<Option<Result<R>>>
where
    R: Send,
    F: Fn(u64) -> Result<R> + Sync,
{
    let workers = workers.clamp(1, n.max(1) as usize);
    let stop = AtomicBool::new(false);
    let mut out: Vec<Option<Result<R>>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (f, stop) = (&f, &stop);
                s.spawn(move || {
                    let mut local = Vec::new();
                    let mut i = w as u64;
                    while i < n && !stop.load(Ordering::Relaxed) {
                        let r = f(i);
                        if r.is_err() {
                            stop.store(true, Ordering::Relaxed);
                        }
                        local.push((i, r));
                        i += workers as u64;
                    }
                    local
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                out[i as usize] = Some(r);
            }
        }
    });
    out
}

/// Splits ordered results into the completed prefix and the first error.
fn ordered<R>(results: Vec<Option<Result<R>>>) -> (Vec<R>, Option<Error>) {
    let mut done = Vec::with_capacity(results.len());
    let mut rest = results.into_iter();
    for r in rest.by_ref() {
        match r {
            Some(Ok(v)) => done.push(v),
            Some(Err(e)) => return (done, Some(e)),
            None => break,
        }
    }
    let err = rest.find_map(|r| r.and_then(Result::err));
    (done, err)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: u64,
    /// Trials whose core window held no certified vertex.
    pub empty_trials: u64,
    pub histogram: BTreeMap<u32, u64>,
    pub p_hat: BTreeMap<u32, f64>,
    pub stderr: BTreeMap<u32, f64>,
    pub i_rho: Option<i64>,
    pub j_rho: Option<i64>,
    /// `P(Δ ∈ {I, I+1})`.
    pub p_two: Option<f64>,
    pub p_two_stderr: Option<f64>,
    /// `P(Δ = I-1)`.
    pub p_below: Option<f64>,
    pub mean_delta: Option<f64>,
    pub mean_stderr: Option<f64>,
}

impl Summary {
    pub fn from_trials(rho: f64, trials: &[TrialResult]) -> Self {
        let n = trials.len() as u64;
        let mut histogram = BTreeMap::new();
        let mut empty_trials = 0;
        for t in trials {
            match t.delta {
                Some(d) => *histogram.entry(d).or_insert(0u64) += 1,
                None => empty_trials += 1,
            }
        }
        let p_hat: BTreeMap<u32, f64> = histogram
            .iter()
            .map(|(&k, &c)| (k, c as f64 / n as f64))
            .collect();
        let stderr = p_hat
            .iter()
            .map(|(&k, &p)| (k, binomial_se(p, n)))
            .collect();
        let pred = predictors(rho);
        let mass = |ks: &[i64]| -> f64 {
            ks.iter()
                .filter_map(|&k| u32::try_from(k).ok())
                .map(|k| histogram.get(&k).copied().unwrap_or(0))
                .sum::<u64>() as f64
                / n as f64
        };
        let p_two = pred.map(|(i, _)| mass(&[i, i + 1]));
        let p_below = pred.map(|(i, _)| mass(&[i - 1]));
        let filled = n - empty_trials;
        let (mean_delta, mean_stderr) = if filled > 0 {
            let m = histogram
                .iter()
                .map(|(&k, &c)| k as f64 * c as f64)
                .sum::<f64>()
                / filled as f64;
            let v = histogram
                .iter()
                .map(|(&k, &c)| (k as f64 - m).powi(2) * c as f64)
                .sum::<f64>()
                / filled as f64;
            (Some(m), Some((v / filled as f64).sqrt()))
        } else {
            (None, None)
        };
        Summary {
            trials: n,
            empty_trials,
            histogram,
            p_hat,
            stderr,
            i_rho: pred.map(|p| p.0),
            j_rho: pred.map(|p| p.1),
            p_two,
            p_two_stderr: p_two.map(|p| binomial_se(p, n)),
            p_below,
            mean_delta,
            mean_stderr,
        }
    }

    pub fn p(&self, k: u32) -> f64 {
        self.p_hat.get(&k).copied().unwrap_or(0.0)
    }

    pub fn p_range(&self, ks: impl std::ops::RangeBounds<u32>) -> f64 {
        self.p_hat.range(ks).fold(0.0, |acc, (_, p)| acc + p)
    }
}

fn run_trials(config: &ExperimentConfig) -> (Vec<TrialResult>, Option<Error>) {
    ordered(parallel_map(config.trials, config.workers, |i| {
        measure(config, i)
            .map(|(r, _)| r)
            .map_err(|e| trial_error(i, e))
    }))
}

/// Runs all trials and summarizes them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultFile> {
    run_experiment_with(config, None)
}

/// As [`run_experiment`]; on failure the completed prefix of trials is
/// written to `partial` before the error is returned.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    partial: Option<&Path>,
) -> Result<ResultFile> {
    config.validate()?;
    let (trials, err) = run_trials(config);
    if let Some(e) = err {
        if let Some(p) = partial {
            let file = ResultFile::new(*config, trials);
            write_json(p, &file)?;
        }
        return Err(e);
    }
    let mut file = ResultFile::new(*config, trials);
    if config.diagnostics.block_tail || config.diagnostics.pad_check {
        let mut d = crate::report::DiagnosticReports::default();
        if config.diagnostics.block_tail {
            let k = file.summary.i_rho.map_or(9, |i| i.max(3) as u32);
            d.block_tail = Some(block_tail_check(config, 10.0, k)?);
        }
        if config.diagnostics.pad_check && config.trials >= 200 {
            d.pad_check = Some(pad_calibration(config)?);
        }
        file.diagnostics = Some(d);
    }
    Ok(file)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PalmSummary {
    pub rho: f64,
    pub trials: u64,
    pub histogram: Histogram,
    /// Trials whose added point had a flower leaving the padded box.
    pub discarded: u64,
}

/// Degree of a point added at the window center, over independent trials.
pub fn run_palm(
    rho: f64,
    trials: u64,
    seed: u64,
    pad_factor: f64,
    workers: usize,
) -> Result<PalmSummary> {
    if trials < 1 {
        return domain("at least one trial is required");
    }
    let window = Window::planar(rho, pad_factor)?;
    let (lo, hi) = (-window.pad(), window.side() + window.pad());
    let padded = Region::new(
        crate::geom::Point2::new(lo, lo),
        crate::geom::Point2::new(hi, hi),
    )?;
    let (degrees, err) = ordered(parallel_map(trials, workers, |i| {
        let s = add_origin(sample_poisson(window, seed, i).map_err(|e| trial_error(i, e))?);
        let o = s.palm.expect("origin added");
        let t = Triangulation::build(&s.points).map_err(|e| trial_error(i, e))?;
        let safe = boundary_safe_flags(&t, &padded)[o];
        Ok(safe.then(|| t.degree_unchecked(o) as u32))
    }));
    if let Some(e) = err {
        return Err(e);
    }
    let mut histogram = Histogram::new();
    let mut discarded = 0;
    for d in degrees {
        match d {
            Some(d) => histogram.add(d),
            None => discarded += 1,
        }
    }
    Ok(PalmSummary {
        rho,
        trials,
        histogram,
        discarded,
    })
}

/// Pools the degrees of all certified core-window vertices over the trials.
pub fn window_degrees(config: &ExperimentConfig) -> Result<Histogram> {
    config.validate()?;
    let (hists, err) = ordered(parallel_map(config.trials, config.workers, |i| {
        let (_, field) = measure(config, i).map_err(|e| trial_error(i, e))?;
        let mut h = Histogram::new();
        for r in field.pmf_records() {
            h.add(r.degree);
        }
        Ok(h)
    }));
    if let Some(e) = err {
        return Err(e);
    }
    let mut total = Histogram::new();
    for h in &hists {
        total.merge(h);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockTailReport {
    pub block_area: f64,
    pub k: u32,
    pub trials: u64,
    /// Trials in which some certified vertex of the block reached degree `k`.
    pub hits: u64,
    pub p_block: f64,
    pub p_block_stderr: f64,
    /// Pooled `P(D >= k)` over certified core-window vertices.
    pub p_typical: f64,
    pub p_typical_stderr: f64,
    /// `vol(B) P(D >= k)`.
    pub upper: f64,
    /// `vol(B) P(D >= k) / 5`.
    pub lower: f64,
    pub upper_ok: bool,
    pub lower_ok: bool,
    pub low_power: bool,
}

/// Estimates `P(M^B >= k)` for a square block at the window center and
/// compares it with `vol(B) P(D >= k)` and a fifth of it.
pub fn block_tail_check(
    config: &ExperimentConfig,
    block_side: f64,
    k: u32,
) -> Result<BlockTailReport> {
    config.validate()?;
    let window = config.window()?;
    let block = Region::centered(window.center(), block_side)?;
    if !Region::core(&window).contains_region(&block) {
        return domain(format!(
            "block of side {block_side} does not fit in the core window"
        ));
    }
    let (per_trial, err) = ordered(parallel_map(config.trials, config.workers, |i| {
        let (_, field) = measure(config, i).map_err(|e| trial_error(i, e))?;
        let hit = field.exceedance_count(&block, k)? > 0;
        let mut typical = (0u64, 0u64);
        for r in field.pmf_records() {
            typical.0 += (r.degree >= k) as u64;
            typical.1 += 1;
        }
        Ok((hit, typical))
    }));
    if let Some(e) = err {
        return Err(e);
    }
    let n = per_trial.len() as u64;
    let hits = per_trial.iter().filter(|t| t.0).count() as u64;
    let (tk, tn) = per_trial
        .iter()
        .fold((0u64, 0u64), |a, t| (a.0 + t.1 .0, a.1 + t.1 .1));
    let p_block = hits as f64 / n as f64;
    let p_block_stderr = binomial_se(p_block, n);
    let p_typical = if tn > 0 { tk as f64 / tn as f64 } else { 0.0 };
    let p_typical_stderr = if tn > 0 {
        binomial_se(p_typical, tn)
    } else {
        0.0
    };
    let area = block.area();
    let upper = area * p_typical;
    let slack = 2.0 * (p_block_stderr.powi(2) + (area * p_typical_stderr).powi(2)).sqrt();
    Ok(BlockTailReport {
        block_area: area,
        k,
        trials: n,
        hits,
        p_block,
        p_block_stderr,
        p_typical,
        p_typical_stderr,
        upper,
        lower: upper / 5.0,
        upper_ok: p_block <= upper + slack,
        lower_ok: p_block >= upper / 5.0 - slack,
        low_power: hits < 20,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadReport {
    pub pad_factors: [f64; 2],
    pub trials: u64,
    pub histograms: [BTreeMap<u32, u64>; 2],
    /// Per-degree count difference, second minus first.
    pub differences: BTreeMap<u32, i64>,
    pub chi_square: f64,
    pub dof: u32,
    pub p_value: f64,
    /// Core-window vertices left uncertified, summed over trials.
    pub unsafe_core: [u64; 2],
    pub distortion: bool,
}

/// Compares the maximal-degree law under `pad_factor` and twice that pad.
pub fn pad_calibration(config: &ExperimentConfig) -> Result<PadReport> {
    pad_comparison(config, 2.0 * config.pad_factor)
}

/// Compares the maximal-degree law under the configured pad and `other`,
/// trial by trial with shared seeds.
pub fn pad_comparison(config: &ExperimentConfig, other: f64) -> Result<PadReport> {
    config.validate()?;
    if config.trials < 200 {
        return domain(format!(
            "pad calibration needs at least 200 trials, got {}",
            config.trials
        ));
    }
    let mut runs = Vec::with_capacity(2);
    for f in [config.pad_factor, other] {
        let c = ExperimentConfig {
            pad_factor: f,
            diagnostics: Diagnostics::default(),
            ..*config
        };
        c.validate()?;
        let (trials, err) = run_trials(&c);
        if let Some(e) = err {
            return Err(e);
        }
        runs.push(trials);
    }
    let hist = |ts: &[TrialResult]| {
        let mut h = BTreeMap::new();
        for t in ts {
            if let Some(d) = t.delta {
                *h.entry(d).or_insert(0u64) += 1;
            }
        }
        h
    };
    let histograms = [hist(&runs[0]), hist(&runs[1])];
    let unsafe_core = [
        runs[0].iter().map(|t| t.n_boundary_unsafe).sum(),
        runs[1].iter().map(|t| t.n_boundary_unsafe).sum(),
    ];
    let keys: std::collections::BTreeSet<u32> =
        histograms.iter().flat_map(|h| h.keys().copied()).collect();
    let get = |h: &BTreeMap<u32, u64>, k| h.get(&k).copied().unwrap_or(0);
    let differences = keys
        .iter()
        .map(|&k| {
            (
                k,
                get(&histograms[1], k) as i64 - get(&histograms[0], k) as i64,
            )
        })
        .collect();
    let bins: Vec<(u64, u64)> = keys
        .iter()
        .map(|&k| (get(&histograms[0], k), get(&histograms[1], k)))
        .collect();
    let (chi_square, dof, p_value) = two_sample_chi_square(&bins);
    Ok(PadReport {
        pad_factors: [config.pad_factor, other],
        trials: config.trials,
        histograms,
        differences,
        chi_square,
        dof,
        p_value,
        unsafe_core,
        distortion: p_value < 0.01 || unsafe_core.iter().any(|&u| u > 0),
    })
}

/// Two-sample chi-square homogeneity test over ordered bins; adjacent bins
/// are pooled until each holds at least 10 observations.
pub fn two_sample_chi_square(bins: &[(u64, u64)]) -> (f64, u32, f64) {
    let mut pooled: Vec<(u64, u64)> = Vec::new();
    let mut acc = (0u64, 0u64);
    for &(a, b) in bins {
        acc = (acc.0 + a, acc.1 + b);
        if acc.0 + acc.1 >= 10 {
            pooled.push(acc);
            acc = (0, 0);
        }
    }
    if acc.0 + acc.1 > 0 {
        match pooled.last_mut() {
            Some(last) => *last = (last.0 + acc.0, last.1 + acc.1),
            None => pooled.push(acc),
        }
    }
    let (na, nb): (u64, u64) = pooled.iter().fold((0, 0), |s, &(a, b)| (s.0 + a, s.1 + b));
    if pooled.len() < 2 || na == 0 || nb == 0 {
        return (0.0, 0, 1.0);
    }
    let (ra, rb) = (
        (nb as f64 / na as f64).sqrt(),
        (na as f64 / nb as f64).sqrt(),
    );
    let stat: f64 = pooled
        .iter()
        .map(|&(a, b)| (ra * a as f64 - rb * b as f64).powi(2) / (a + b) as f64)
        .sum();
    let dof = pooled.len() as u32 - 1;
    let p = ChiSquared::new(dof as f64).map_or(f64::NAN, |d| d.sf(stat));
    (stat, dof, p)
}
