//! Training a quantile-surface network from scratch on isotropic Gaussian
//! data. The learned 0.9 radius should approach sqrt(chi2_inv(0.9, 2)) in
//! every direction, the closed-form answer for this generator.
//!
//! Run with: cargo run --release --example qsnn_training_basic

use qsurf::nets::{train_qsnn, Activation, PointModel, TrainConfig};
use qsurf::numkit::{chi2_inverse_cdf, sample_standard_normal, Rng};

fn main() {
    let mut rng = Rng::new(8);
    let observations: Vec<Vec<f64>> = (0..4000)
        .map(|_| {
            vec![
                sample_standard_normal(&mut rng),
                sample_standard_normal(&mut rng),
            ]
        })
        .collect();

    let point = PointModel::Constant(vec![0.0, 0.0]);
    let config = TrainConfig {
        epochs: 4000,
        learning_rate: 0.1,
        l2: 0.5,
        seed: 9,
        ..TrainConfig::default()
    };
    let levels = [0.5, 0.9];
    let (model, curve) = train_qsnn(
        &[],
        &observations,
        &point,
        &levels,
        &[10],
        Activation::Tanh,
        &config,
    )
    .expect("training");

    println!("pinball objective during training:");
    for epoch in [0, 9, 99, 999, curve.len() - 1] {
        println!("  epoch {:>5}: {:.1}", epoch + 1, curve[epoch]);
    }

    println!();
    println!("learned 0.9 radius vs closed form {:.4}:", chi2_inverse_cdf(0.9, 2).unwrap().sqrt());
    for deg in (0..360).step_by(45) {
        let a = (deg as f64).to_radians();
        let r = model.predict_radius(&[a.cos(), a.sin()], &[], 1).expect("radius");
        println!("  {deg:>3} deg: {r:.4}");
    }
}
