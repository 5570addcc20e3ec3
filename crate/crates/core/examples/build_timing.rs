use pdx_core::delaunay::Triangulation;
use pdx_core::sampling::{sample_poisson, Window};
use std::time::Instant;

fn main() {
    let rho: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().unwrap())
        .unwrap_or(1e6);
    let w = Window::planar(rho, 4.0).unwrap();
    for trial in 0..3 {
        let t0 = Instant::now();
        let s = sample_poisson(w, 1, trial).unwrap();
        let t1 = Instant::now();
        let t = Triangulation::build(&s.points).unwrap();
        let t2 = Instant::now();
        let max = (0..t.num_vertices())
            .map(|v| t.degree_unchecked(v))
            .max()
            .unwrap();
        println!(
            "n={} sample={:?} build={:?} tris={} max={}",
            s.points.len(),
            t1 - t0,
            t2 - t1,
            t.triangles().len(),
            max
        );
    }
}
