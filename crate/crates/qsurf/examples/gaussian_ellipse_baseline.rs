//! The Gaussian baseline in isolation: fit a covariance by maximum
//! likelihood, derive directional quantiles through the chi-square link and
//! compare the resulting ellipse against its closed-form area.
//!
//! Run with: cargo run --example gaussian_ellipse_baseline

use qsurf::directional::{direction_grid, polygon_area, QuantileSurfaceForecast};
use qsurf::gaussian::{fit_unconditional, gaussian_directional_quantile};
use qsurf::nets::PointModel;
use qsurf::numkit::{chi2_inverse_cdf, Rng};
use qsurf::synthdata::gen_mgd;

fn main() {
    let mut rng = Rng::new(42);
    let observations = gen_mgd(&mut rng, 5000);
    let point = PointModel::Constant(vec![0.0, 0.0]);
    let forecast = fit_unconditional(&[], &observations, &point).expect("fit");

    println!("fitted covariance:");
    println!("  [{:>7.4} {:>7.4}]", forecast.covariance.m[0][0], forecast.covariance.m[0][1]);
    println!("  [{:>7.4} {:>7.4}]", forecast.covariance.m[1][0], forecast.covariance.m[1][1]);

    let tau = 0.9;
    let grid = direction_grid(360).expect("grid");
    let radii: Vec<f64> = grid
        .iter()
        .map(|u| gaussian_directional_quantile(&forecast, u, tau).expect("quantile"))
        .collect();
    let surface = QuantileSurfaceForecast {
        origin: vec![0.0, 0.0],
        levels: vec![tau],
        radii: vec![radii],
        directions: grid,
    };
    let area = polygon_area(&surface, 0).expect("area");
    let analytic = std::f64::consts::PI
        * forecast.covariance.det().sqrt()
        * chi2_inverse_cdf(tau, 2).expect("chi2");
    println!();
    println!("0.9 ellipse area: sampled polygon {area:.4}, closed form {analytic:.4}");
}
