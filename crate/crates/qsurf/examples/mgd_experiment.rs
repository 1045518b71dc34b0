//! Full experiment on the multivariate Gaussian dataset: generate data, fit
//! the point estimate, the QSNN and the Gaussian baseline, then print the
//! reliability table and the skill score.
//!
//! Run with: cargo run --release --example mgd_experiment

use qsurf::harness::{run_experiment, ExperimentConfig};
use qsurf::synthdata::SyntheticKind;

fn main() {
    // reduced epoch budget so the example finishes in seconds; drop the
    // .fast() call for the full 50000-epoch run
    let config = ExperimentConfig::preset(SyntheticKind::Mgd, 0).fast();
    let (_, report) = run_experiment(&config).expect("experiment");

    println!("reliability (nominal level vs observed coverage):");
    println!("{:>8} {:>10} {:>10}", "level", "qsnn", "gaussian");
    let qsnn = &report.models[0];
    let base = &report.models[1];
    for (i, &(tau, cov)) in qsnn.reliability.points.iter().enumerate() {
        println!("{tau:>8.2} {cov:>10.3} {:>10.3}", base.reliability.points[i].1);
    }
    println!();
    println!("avg directional CRPS: qsnn {:.4}, gaussian {:.4}", qsnn.avg_crps, base.avg_crps);
    println!("qsnn skill vs gaussian baseline: {:.1}%", 100.0 * qsnn.skill_vs_baseline.unwrap());
}
