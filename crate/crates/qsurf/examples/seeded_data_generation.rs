//! The synthetic generators and their reproducibility: every dataset is a
//! pure function of the seed, and sample moments track the generating
//! parameters.
//!
//! Run with: cargo run --example seeded_data_generation

use qsurf::numkit::Rng;
use qsurf::synthdata::{gen_cmgd, gen_mgd, gen_smd, MGD_VAR_1, MGD_VAR_2};

fn column_variance(data: &[Vec<f64>], col: usize) -> f64 {
    let n = data.len() as f64;
    let mean = data.iter().map(|r| r[col]).sum::<f64>() / n;
    data.iter().map(|r| (r[col] - mean).powi(2)).sum::<f64>() / n
}

fn main() {
    let n = 20_000;

    let mgd = gen_mgd(&mut Rng::new(0), n);
    println!("mgd sample variances: {:.3} / {:.3} (parameters {MGD_VAR_1} / {MGD_VAR_2})",
        column_variance(&mgd, 0), column_variance(&mgd, 1));

    let smd = gen_smd(&mut Rng::new(0), n);
    let mean: Vec<f64> = (0..2)
        .map(|c| smd.iter().map(|r| r[c]).sum::<f64>() / n as f64)
        .collect();
    println!("smd sample mean: ({:.3}, {:.3}) -- the rotated (1, 4) component means", mean[0], mean[1]);

    let (features, _) = gen_cmgd(&mut Rng::new(0), n).expect("cmgd");
    let ones = features.iter().filter(|f| f[0] == 1.0).count();
    println!("cmgd condition balance: {} zeros, {} ones", n - ones, ones);

    // identical seeds reproduce the dataset exactly; different seeds do not
    let again = gen_mgd(&mut Rng::new(0), n);
    let other = gen_mgd(&mut Rng::new(1), n);
    println!("seed 0 == seed 0: {}", mgd == again);
    println!("seed 0 == seed 1: {}", mgd == other);
}
