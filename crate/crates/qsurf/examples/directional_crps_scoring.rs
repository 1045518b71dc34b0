//! Scoring forecasts with the directional CRPS: build a piecewise-linear
//! length CDF from discrete quantiles, integrate the score in closed form,
//! cross-check against quadrature and compare two forecasters with the skill
//! score.
//!
//! Run with: cargo run --example directional_crps_scoring

use qsurf::gaussian::{gaussian_directional_quantile, GaussianForecast};
use qsurf::metrics::{crps_quadrature, skill, DirectionalCdf};
use qsurf::numkit::{sample_standard_normal, Matrix2, Rng};

fn main() {
    let levels: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();

    // a sharp forecaster matching the data and a blurred one at twice the
    // spread, both discretized to the same levels
    let sharp = GaussianForecast::centered(Matrix2::identity());
    let blurred = GaussianForecast::centered(Matrix2::diag(4.0, 4.0));
    let direction = [1.0, 0.0];
    let cdf_for = |g: &GaussianForecast| {
        let radii: Vec<f64> = levels
            .iter()
            .map(|&t| gaussian_directional_quantile(g, &direction, t).expect("quantile"))
            .collect();
        DirectionalCdf::from_quantiles(&levels, &radii).expect("cdf")
    };
    let sharp_cdf = cdf_for(&sharp);
    let blurred_cdf = cdf_for(&blurred);

    // one observed length drawn from the sharp distribution
    let mut rng = Rng::new(7);
    let (x, y) = (sample_standard_normal(&mut rng), sample_standard_normal(&mut rng));
    let observed = x.hypot(y);
    println!("observed length: {observed:.4}");
    let exact = sharp_cdf.crps(observed).expect("crps");
    println!(
        "sharp forecast CRPS: closed form {exact:.6}, quadrature {:.6}",
        crps_quadrature(&sharp_cdf, observed, 100_000)
    );

    // average over many draws to compare the two forecasters
    let mut sum_sharp = 0.0;
    let mut sum_blurred = 0.0;
    let n = 2000;
    for _ in 0..n {
        let (x, y) = (sample_standard_normal(&mut rng), sample_standard_normal(&mut rng));
        let o = x.hypot(y);
        sum_sharp += sharp_cdf.crps(o).expect("crps");
        sum_blurred += blurred_cdf.crps(o).expect("crps");
    }
    let (avg_sharp, avg_blurred) = (sum_sharp / n as f64, sum_blurred / n as f64);
    println!();
    println!("average CRPS over {n} draws: sharp {avg_sharp:.4}, blurred {avg_blurred:.4}");
    println!(
        "skill of sharp vs blurred: {:.1}%",
        100.0 * skill(avg_sharp, avg_blurred).expect("skill")
    );
}
