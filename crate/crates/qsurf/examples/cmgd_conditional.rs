//! Conditional forecasting: a binary feature flips which axis carries the
//! large variance. The QSNN reads the feature and reshapes its surface per
//! condition; the unconditional Gaussian baseline blurs the two regimes
//! together and scores worse.
//!
//! Run with: cargo run --release --example cmgd_conditional

use qsurf::harness::{run_experiment, ExperimentConfig};
use qsurf::synthdata::SyntheticKind;

fn main() {
    let config = ExperimentConfig::preset(SyntheticKind::Cmgd, 4).fast();
    let (models, report) = run_experiment(&config).expect("experiment");

    println!("0.9 quantile radius along each axis, per condition:");
    let level_09 = config.levels.iter().position(|&t| t == 0.9).unwrap();
    for feature in [0.0, 1.0] {
        let along_x = models.qsnn.radii_at(&[1.0, 0.0], &[feature]).unwrap()[level_09];
        let along_y = models.qsnn.radii_at(&[0.0, 1.0], &[feature]).unwrap()[level_09];
        println!("  condition {feature}: x-axis {along_x:.2}, y-axis {along_y:.2}");
    }

    println!();
    println!("avg directional CRPS on the test split:");
    for m in &report.models {
        match m.skill_vs_baseline {
            Some(s) => println!("  {:<24} {:.4} (skill {:.1}%)", m.model, m.avg_crps, 100.0 * s),
            None => println!("  {:<24} {:.4} (baseline)", m.model, m.avg_crps),
        }
    }
}
