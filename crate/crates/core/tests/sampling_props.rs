use pdx_core::sampling::{add_origin, default_pad, sample_poisson, trial_seed, Window};
use proptest::prelude::*;
use std::collections::HashSet;

fn window(rho: f64) -> Window {
    Window::planar(rho, 4.0).unwrap()
}

#[test]
fn counts_are_poisson() {
    let w = window(400.0);
    let mean = w.padded_side().powi(2);
    let counts: Vec<f64> = (0..2000)
        .map(|i| sample_poisson(w, 11, i).unwrap().points.len() as f64)
        .collect();
    let n = counts.len() as f64;
    let m = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - m).powi(2)).sum::<f64>() / (n - 1.0);
    // sample mean within 4 standard errors, dispersion index near 1
    assert!((m - mean).abs() < 4.0 * (mean / n).sqrt(), "{m} vs {mean}");
    assert!((var / mean - 1.0).abs() < 0.1, "dispersion {}", var / mean);
}

#[test]
fn points_are_uniform_over_the_padded_box() {
    let w = window(1e4);
    let s = sample_poisson(w, 3, 0).unwrap();
    let lo = -w.pad();
    let len = w.padded_side();
    let bins = 10usize;
    let mut grid = vec![0u64; bins * bins];
    for p in &s.points {
        assert!(w.in_padded(p));
        let i = (((p.x - lo) / len * bins as f64) as usize).min(bins - 1);
        let j = (((p.y - lo) / len * bins as f64) as usize).min(bins - 1);
        grid[j * bins + i] += 1;
    }
    let e = s.points.len() as f64 / grid.len() as f64;
    let chi: f64 = grid.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    // 99 degrees of freedom; 99.9% quantile is about 149
    assert!(chi < 149.0, "chi-square {chi}");
}

#[test]
fn samples_are_reproducible() {
    let w = window(2e3);
    let a = sample_poisson(w, 5, 17).unwrap();
    let b = sample_poisson(w, 5, 17).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.points, sample_poisson(w, 5, 18).unwrap().points);
    assert_ne!(a.points, sample_poisson(w, 6, 17).unwrap().points);
}

#[test]
fn trial_streams_are_independent() {
    let w = window(100.0);
    let n = 1000u64;
    let counts: Vec<f64> = (0..2 * n)
        .map(|i| sample_poisson(w, 9, i).unwrap().points.len() as f64)
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = counts.chunks(2).map(|c| (c[0], c[1])).unzip();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&x), mean(&y));
    let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r = cov / (vx * vy).sqrt();
    assert!(r.abs() < 0.05, "correlation {r}");

    let a: HashSet<u64> = sample_poisson(w, 9, 0)
        .unwrap()
        .points
        .iter()
        .map(|p| p.x.to_bits())
        .collect();
    let b = sample_poisson(w, 9, 1).unwrap();
    assert!(b.points.iter().all(|p| !a.contains(&p.x.to_bits())));
}

#[test]
fn origin_sits_at_the_center() {
    let w = window(64.0);
    let s = add_origin(sample_poisson(w, 1, 0).unwrap());
    let v = s.palm.unwrap();
    assert_eq!(v, s.points.len() - 1);
    assert_eq!(s.points[v], w.center());
    assert!((default_pad(64.0) - w.pad()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn side_matches_volume(rho in 1.0f64..1e12, dim in 2u32..5) {
        let w = Window::new(rho, dim, 0.0).unwrap();
        prop_assert!((w.side().powi(dim as i32) / rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeds_spread(seed in any::<u64>(), i in any::<u64>()) {
        prop_assert_ne!(trial_seed(seed, i), trial_seed(seed, i.wrapping_add(1)));
    }
}
