use pdx_core::experiments::{window_degrees, ExperimentConfig};

fn main() {
    let rho: f64 = std::env::args().nth(1).map_or(1e6, |s| s.parse().unwrap());
    let trials: u64 = std::env::args().nth(2).map_or(4, |s| s.parse().unwrap());
    let h = window_degrees(&ExperimentConfig::new(rho, trials, 11)).unwrap();
    println!("vertices {} mean {:.5}", h.total, h.mean());
    for (k, c) in &h.counts {
        println!("{k:>3} {c:>10} {:.4e}", h.pmf(*k));
    }
}
