//! Surface area two ways: the exact shoelace formula over the sampled
//! polygon and a Monte Carlo volume estimate from uniform box samples. Both
//! converge to pi for the unit circle as the direction grid refines.
//!
//! Run with: cargo run --example monte_carlo_vs_shoelace

use qsurf::directional::{direction_grid, monte_carlo_volume, polygon_area, QuantileSurfaceForecast};
use qsurf::numkit::Rng;

fn main() {
    println!("{:>6} {:>12} {:>12}", "D", "shoelace", "(D/2)sin(2pi/D)");
    for d in [3usize, 6, 12, 60, 360, 3600] {
        let grid = direction_grid(d).expect("grid");
        let surface = QuantileSurfaceForecast {
            origin: vec![0.0, 0.0],
            levels: vec![0.5],
            radii: vec![vec![1.0; d]],
            directions: grid,
        };
        let area = polygon_area(&surface, 0).expect("area");
        let analytic = d as f64 / 2.0 * (std::f64::consts::TAU / d as f64).sin();
        println!("{d:>6} {area:>12.8} {analytic:>12.8}");
    }

    println!();
    let mut rng = Rng::new(1);
    for samples in [1000usize, 10_000, 100_000, 1_000_000] {
        let mc = monte_carlo_volume(
            |p| p[0] * p[0] + p[1] * p[1] <= 1.0,
            &[-1.0, -1.0],
            &[1.0, 1.0],
            samples,
            &mut rng,
        )
        .expect("volume");
        println!("monte carlo, {samples:>8} samples: {mc:.5} (pi = {:.5})", std::f64::consts::PI);
    }
}
