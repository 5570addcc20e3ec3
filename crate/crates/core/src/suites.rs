//! Self-checking property suites, runnable from the command line.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::integral_pmf_mc;
use crate::delaunay::Triangulation;
use crate::error::Result;
use crate::experiments::run_palm;
use crate::flowers::{phi_content, voronoi_flower, PhiMethod};
use crate::geom::Point2;
use crate::graph::{
    check_five_bound, check_triple_bound, union_bound_check, EventMatrix, SimpleGraph,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            checks: Vec::new(),
        }
    }

    fn record(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn uniform_points(rng: &mut impl Rng, n: usize, side: f64) -> Vec<Point2<f64>> {
    (0..n)
        .map(|_| Point2::new(side * rng.random::<f64>(), side * rng.random::<f64>()))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct PlanarityParams {
    pub graphs: usize,
    pub n: usize,
    pub five_subsets: usize,
}

impl Default for PlanarityParams {
    fn default() -> Self {
        Self {
            graphs: 100,
            n: 200,
            five_subsets: 10_000,
        }
    }
}

/// Triple and five-set bounds on random Delaunay graphs, and rejection of
/// `K_{3,3}`.
pub fn planarity(seed: u64, p: PlanarityParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("planarity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triple_fail = None;
    let (mut five_ok, mut five_total) = (0usize, 0usize);
    let per_graph = p.five_subsets.div_ceil(p.graphs.max(1));
    for gi in 0..p.graphs {
        let pts = uniform_points(&mut rng, p.n, 1.0);
        let g = SimpleGraph::from_triangulation(&Triangulation::build(&pts)?);
        if let Some(w) = check_triple_bound(&g) {
            triple_fail.get_or_insert((gi, w));
        }
        for _ in 0..per_graph.min(p.five_subsets - five_total) {
            let s = sample_indices(&mut rng, p.n, 5).into_vec();
            five_ok += check_five_bound(&g, &s)? as usize;
            five_total += 1;
        }
    }
    rep.record(
        "triple bound on Delaunay graphs",
        triple_fail.is_none(),
        match &triple_fail {
            None => format!("{} graphs with {} vertices", p.graphs, p.n),
            Some((gi, w)) => format!("graph {gi}: triple {:?} shares {:?}", w.triple, w.common),
        },
    );
    rep.record(
        "five-set bound on Delaunay graphs",
        five_ok == five_total,
        format!("{five_ok}/{five_total} subsets"),
    );
    let k33 = check_triple_bound(&SimpleGraph::complete_bipartite(3, 3));
    rep.record(
        "K33 rejected",
        k33.is_some(),
        format!("{:?}", k33.map(|w| w.triple)),
    );
    Ok(rep)
}

#[derive(Debug, Clone, Copy)]
pub struct FlowerParams {
    pub flowers: usize,
    pub points: usize,
    pub mc_samples: u64,
}

impl Default for FlowerParams {
    fn default() -> Self {
        Self {
            flowers: 50,
            points: 500,
            mc_samples: 1_000_000,
        }
    }
}

/// Exact flower areas against Monte-Carlo estimates, and emptiness of the
/// flower with respect to the remaining points.
pub fn flower(seed: u64, p: FlowerParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("flower");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut agree, mut empty, mut worst_z) = (0usize, 0usize, 0.0f64);
    for fi in 0..p.flowers {
        let side = (p.points as f64).sqrt();
        let pts = uniform_points(&mut rng, p.points, side);
        let t = Triangulation::build(&pts)?;
        let interior: Vec<usize> = (0..t.num_vertices()).filter(|&v| !t.is_hull(v)).collect();
        let v = interior[rng.random_range(0..interior.len())];
        let f = voronoi_flower(&t, v)?;
        let exact = phi_content(&f, PhiMethod::Exact)?;
        let mc = phi_content(
            &f,
            PhiMethod::MonteCarlo {
                samples: p.mc_samples,
                seed: seed ^ fi as u64,
            },
        )?;
        let z = (exact.value - mc.value).abs() / mc.std_error.max(f64::MIN_POSITIVE);
        worst_z = worst_z.max(z);
        agree += (z <= 3.0) as usize;
        let nbrs = t.neighbors(v);
        let intruder = pts.iter().enumerate().any(|(u, q)| {
            u != v && !nbrs.contains(&(u as u32)) && f.petals.iter().any(|d| d.contains_strict(q))
        });
        empty += (!intruder) as usize;
    }
    rep.record(
        "exact area within 3 standard errors of Monte Carlo",
        agree == p.flowers,
        format!("{agree}/{} flowers, largest z = {worst_z:.2}", p.flowers),
    );
    rep.record(
        "flowers hold no other vertex",
        empty == p.flowers,
        format!("{empty}/{} flowers", p.flowers),
    );
    Ok(rep)
}

#[derive(Debug, Clone, Copy)]
pub struct UnionParams {
    pub max_outcomes: usize,
    pub max_events: usize,
    pub random_matrices: usize,
}

impl Default for UnionParams {
    fn default() -> Self {
        Self {
            max_outcomes: 4,
            max_events: 4,
            random_matrices: 100_000,
        }
    }
}

/// The union lower bound on every small uniform event matrix and on random
/// weighted matrices of bounded multiplicity.
pub fn union(seed: u64, p: UnionParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("union");
    let (mut checked, mut failed) = (0u64, 0u64);
    for rows in 1..=p.max_outcomes {
        for events in 1..=p.max_events {
            let cells = rows * events;
            for bits in 0u64..(1 << cells) {
                let m: Vec<Vec<bool>> = (0..rows)
                    .map(|r| {
                        (0..events)
                            .map(|e| bits >> (r * events + e) & 1 == 1)
                            .collect()
                    })
                    .collect();
                let m = EventMatrix::uniform(m)?;
                for k in 1..=events {
                    let r = union_bound_check(&m, k)?;
                    if r.precondition {
                        checked += 1;
                        failed += (!r.holds()) as u64;
                    }
                }
            }
        }
    }
    rep.record(
        "exhaustive small matrices",
        failed == 0,
        format!("{failed} failures in {checked} admissible (matrix, k) pairs"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0usize;
    for _ in 0..p.random_matrices {
        let outcomes = rng.random_range(1..=8);
        let events = rng.random_range(1..=8);
        let k = rng.random_range(1..=events);
        let mut w: Vec<f64> = (0..outcomes).map(|_| rng.random::<f64>()).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let rows: Vec<Vec<bool>> = (0..outcomes)
            .map(|_| {
                let m = rng.random_range(0..=k);
                let chosen = sample_indices(&mut rng, events, m).into_vec();
                (0..events).map(|e| chosen.contains(&e)).collect()
            })
            .collect();
        let r = union_bound_check(&EventMatrix::new(w, rows)?, k)?;
        bad += (!r.holds()) as usize;
    }
    rep.record(
        "random weighted matrices",
        bad == 0,
        format!("{bad} failures in {}", p.random_matrices),
    );
    Ok(rep)
}

#[derive(Debug, Clone, Copy)]
pub struct McIntegralParams {
    pub radius: f64,
    pub samples: u64,
    pub palm_rho: f64,
    pub palm_trials: u64,
    pub workers: usize,
}

impl Default for McIntegralParams {
    fn default() -> Self {
        Self {
            radius: 1.2,
            samples: 30_000_000,
            palm_rho: 16.0,
            palm_trials: 100_000,
            workers: crate::experiments::default_workers(),
        }
    }
}

/// `P(D = 3)` from the volume integral against the Palm estimator.
pub fn mcintegral(seed: u64, p: McIntegralParams) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("mcintegral");
    let mc = integral_pmf_mc(3, p.radius, p.samples, seed)?;
    let palm = run_palm(p.palm_rho, p.palm_trials, seed, 4.0, p.workers)?;
    let pp = palm.histogram.pmf(3);
    let se = (mc.std_error.powi(2) + palm.histogram.std_error(3).powi(2)).sqrt();
    let z = (mc.estimate - pp).abs() / se;
    rep.record(
        "integral agrees with Palm estimate at k = 3",
        z <= 3.0,
        format!(
            "integral {:.5} ± {:.5}, Palm {pp:.5} ± {:.5}, z = {z:.2}",
            mc.estimate,
            mc.std_error,
            palm.histogram.std_error(3)
        ),
    );
    rep.record(
        "integration cube contains the support",
        !mc.shell_warning,
        format!("{} of {} hits in the outer shell", mc.shell_hits, mc.hits),
    );
    Ok(rep)
}
