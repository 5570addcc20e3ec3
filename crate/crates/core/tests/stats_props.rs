mod common;

use common::*;
use pdx_core::geom::Point2;
use pdx_core::sampling::{sample_poisson, Sample, Window};
use pdx_core::stats::{
    cell_distance, decay_exponent, e_rho_holds, empirical_pmf, subdivide, DegreeField, Histogram,
    Region,
};
use pdx_core::Triangulation;
use proptest::prelude::*;
use rand::Rng;

fn field(rho: f64, seed: u64, trial: u64) -> (Sample, DegreeField) {
    let w = Window::planar(rho, 4.0).unwrap();
    let s = sample_poisson(w, seed, trial).unwrap();
    let t = Triangulation::build(&s.points).unwrap();
    let f = DegreeField::new(&t, &w);
    (s, f)
}

#[test]
fn certified_degrees_match_voronoi_cells() {
    let (s, f) = field(400.0, 41, 0);
    let w = s.window;
    let (lo, hi) = (-w.pad(), w.side() + w.pad());
    let mut checked = 0;
    for r in f.records() {
        let inside = oracle_flower_inside(&s.points, r.vertex, lo, hi);
        if r.boundary_safe {
            assert!(
                inside,
                "vertex {} certified but its flower leaves the box",
                r.vertex
            );
            assert_eq!(r.degree as usize, oracle_degree(&s.points, r.vertex).0);
            checked += 1;
        }
    }
    assert!(checked > 400);
}

#[test]
fn region_queries_match_oracle() {
    let (s, f) = field(400.0, 42, 0);
    let side = s.window.side();
    let w = s.window;
    let (lo, hi) = (-w.pad(), w.side() + w.pad());
    let truth: Vec<Option<u32>> = (0..s.points.len())
        .map(|v| {
            let safe = oracle_flower_inside(&s.points, v, lo, hi);
            safe.then(|| oracle_degree(&s.points, v).0 as u32)
        })
        .collect();
    let mut r = rng(43);
    for _ in 0..200 {
        let (x0, x1) = (r.random::<f64>() * side, r.random::<f64>() * side);
        let (y0, y1) = (r.random::<f64>() * side, r.random::<f64>() * side);
        let reg = Region::new(
            Point2::new(x0.min(x1), y0.min(y1)),
            Point2::new(x0.max(x1), y0.max(y1)),
        )
        .unwrap();
        let inside = || {
            s.points
                .iter()
                .zip(&truth)
                .filter(|(p, _)| reg.contains(p))
                .filter_map(|(_, d)| *d)
        };
        assert_eq!(f.max_degree(&reg).unwrap(), inside().max());
        for k in [5, 7, 9] {
            let want = inside().filter(|&d| d >= k).count() as u64;
            assert_eq!(f.exceedance_count(&reg, k).unwrap(), want);
        }
    }
}

#[test]
fn queries_outside_the_core_fail() {
    let (_, f) = field(100.0, 44, 0);
    let out = Region::new(Point2::new(-1.0, 0.0), Point2::new(5.0, 5.0)).unwrap();
    assert!(f.max_degree(&out).is_err());
    let core = *f.core();
    assert!(f.cluster_count(&core, 5, 0).is_err());
}

#[test]
fn grid_cells_are_covered() {
    let w = Window::planar(1e5, 4.0).unwrap();
    let g = subdivide(&w, 2.5).unwrap();
    assert!((g.cell_side * g.n_cells_per_side as f64 - w.side()).abs() < 1e-9);
    let failures = (0..1000)
        .filter(|&i| !e_rho_holds(&sample_poisson(w, 45, i).unwrap(), &g))
        .count();
    assert!(
        failures < 10,
        "{failures} of 1000 samples left a cell empty"
    );
}

#[test]
fn far_cells_are_uncorrelated() {
    let rho = 1e4;
    let w = Window::planar(rho, 4.0).unwrap();
    let g = subdivide(&w, 2.5).unwrap();
    let n = g.n_cells_per_side;
    let trials = 1000;
    let k = 10;
    let hits: Vec<Vec<bool>> = (0..trials)
        .map(|i| {
            let (_, f) = field(rho, 46, i);
            f.cell_exceedances(&g, k).iter().map(|&c| c > 0).collect()
        })
        .collect();
    let cells: Vec<[usize; 2]> = (0..n * n).map(|c| [c % n, c / n]).collect();
    let mean: Vec<f64> = (0..n * n)
        .map(|c| hits.iter().filter(|h| h[c]).count() as f64 / trials as f64)
        .collect();
    let (mut pairs, mut loud, mut total) = (0u64, 0u64, 0.0);
    for a in 0..n * n {
        for b in a + 1..n * n {
            if cell_distance(cells[a], cells[b]) <= g.dependence_range as usize {
                continue;
            }
            let both = hits.iter().filter(|h| h[a] && h[b]).count() as f64 / trials as f64;
            let cov = both - mean[a] * mean[b];
            let sd = (mean[a] * (1.0 - mean[a]) * mean[b] * (1.0 - mean[b])).sqrt();
            if sd == 0.0 {
                continue;
            }
            let r = cov / sd;
            pairs += 1;
            total += r;
            if r.abs() > 0.1 {
                loud += 1;
            }
        }
    }
    // each correlation carries sampling noise of about 1/sqrt(1000)
    assert!(pairs > 10_000);
    assert!(
        (total / pairs as f64).abs() < 0.01,
        "mean correlation {}",
        total / pairs as f64
    );
    assert!(
        (loud as f64) < 0.01 * pairs as f64,
        "{loud} of {pairs} pairs beyond 0.1"
    );
}

#[test]
fn typical_degree_law() {
    let mut h = Histogram::new();
    for i in 0..100 {
        let (_, f) = field(1e4, 47, i);
        h.merge(&empirical_pmf(f.pmf_records()).unwrap());
    }
    assert!((h.mean() - 6.0).abs() < 0.01, "mean {}", h.mean());
    // the normalized decay exponent grows through the observed tail
    let last = h.largest_with_hits(100).unwrap();
    let e: Vec<f64> = (6..=last).map(|k| decay_exponent(k, h.pmf(k))).collect();
    assert!(last >= 11);
    assert!(e.windows(2).all(|w| w[1] > w[0]), "{e:?}");
}

fn histogram() -> impl Strategy<Value = Histogram> {
    prop::collection::vec((3u32..20, 0u64..50), 0..10).prop_map(|v| {
        let mut h = Histogram::new();
        for (k, n) in v {
            h.add_n(k, n);
        }
        h
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exceedance_laws(seed in any::<u64>(), cut in 0.1f64..0.9, k in 3u32..14) {
        let (s, f) = field(200.0, seed, 0);
        let side = s.window.side();
        let all = *f.core();
        let left = Region::new(Point2::new(0.0, 0.0), Point2::new(cut * side, side)).unwrap();
        let right = Region::new(Point2::new(cut * side, 0.0), Point2::new(side, side)).unwrap();
        let c = f.exceedance_count(&all, k).unwrap();
        prop_assert_eq!(f.max_degree(&all).unwrap().is_some_and(|m| m >= k), c >= 1);
        prop_assert!(f.exceedance_count(&all, k + 1).unwrap() <= c);
        // additivity, minus points that sit exactly on the shared edge
        let on_cut = s.points.iter().filter(|p| p.x == cut * side).count() as u64;
        let split = f.exceedance_count(&left, k).unwrap() + f.exceedance_count(&right, k).unwrap();
        prop_assert!(split >= c && split <= c + on_cut);
        prop_assert_eq!(f.cluster_count(&all, k, 1).unwrap(), (c >= 1) as u64);
    }

    #[test]
    fn merging_is_associative_and_commutative(a in histogram(), b in histogram(), c in histogram()) {
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        prop_assert_eq!(&ab, &ba);
        let mut ab_c = ab.clone();
        ab_c.merge(&c);
        let mut bc = b.clone();
        bc.merge(&c);
        let mut a_bc = a.clone();
        a_bc.merge(&bc);
        prop_assert_eq!(&ab_c, &a_bc);
        prop_assert_eq!(ab_c.total, ab_c.counts.values().sum::<u64>());
    }
}
