//! On-disk experiment artifacts: datasets, persisted models, report tables
//! and the checksum manifest.

use super::config::ExperimentConfig;
use super::report::{dataset_csv, EvaluationReport};
use super::runner::{Dataset, TrainedModels};
use crate::error::Result;
use crate::nets::persist::{self, SavedModel};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

pub const CONFIG_FILE: &str = "config.txt";
pub const TRAIN_DATA_FILE: &str = "dataset_train.csv";
pub const TEST_DATA_FILE: &str = "dataset_test.csv";
pub const POINT_MODEL_FILE: &str = "point.model.json";
pub const QSNN_MODEL_FILE: &str = "qsnn.model.json";
pub const GAUSSIAN_MODEL_FILE: &str = "gaussian_unconditional.model.json";
pub const COVNET_MODEL_FILE: &str = "gaussian_conditional.model.json";
pub const REPORT_FILE: &str = "report.json";
pub const MANIFEST_FILE: &str = "manifest";

pub fn write_datasets(dir: &Path, train: &Dataset, test: &Dataset) -> Result<Vec<String>> {
    std::fs::write(
        dir.join(TRAIN_DATA_FILE),
        dataset_csv(&train.features, &train.observations),
    )?;
    std::fs::write(
        dir.join(TEST_DATA_FILE),
        dataset_csv(&test.features, &test.observations),
    )?;
    Ok(vec![TRAIN_DATA_FILE.to_string(), TEST_DATA_FILE.to_string()])
}

pub fn write_models(dir: &Path, models: &TrainedModels) -> Result<Vec<String>> {
    let mut written = Vec::new();
    persist::save(
        &SavedModel::Point(models.point.clone()),
        &dir.join(POINT_MODEL_FILE),
    )?;
    written.push(POINT_MODEL_FILE.to_string());
    persist::save(
        &SavedModel::Qsnn(models.qsnn.clone()),
        &dir.join(QSNN_MODEL_FILE),
    )?;
    written.push(QSNN_MODEL_FILE.to_string());
    persist::save(
        &SavedModel::Gaussian(models.gaussian.clone()),
        &dir.join(GAUSSIAN_MODEL_FILE),
    )?;
    written.push(GAUSSIAN_MODEL_FILE.to_string());
    if let Some(net) = &models.covnet {
        persist::save(
            &SavedModel::CovarianceNet(net.clone()),
            &dir.join(COVNET_MODEL_FILE),
        )?;
        written.push(COVNET_MODEL_FILE.to_string());
    }
    Ok(written)
}

/// Write the checksum manifest over the named files (sorted), recording the
/// config and seed. No timestamps: output is a pure function of the inputs.
pub fn write_manifest(dir: &Path, config: &ExperimentConfig, mut files: Vec<String>) -> Result<()> {
    files.sort();
    files.dedup();
    let mut out = String::new();
    let _ = writeln!(out, "manifest_version = 1");
    let _ = writeln!(out, "seed = {}", config.seed);
    for line in config.to_text().lines() {
        let _ = writeln!(out, "config.{line}");
    }
    for name in &files {
        let bytes = std::fs::read(dir.join(name))?;
        let digest = Sha256::digest(&bytes);
        let mut hex = String::with_capacity(64);
        for b in digest {
            let _ = write!(hex, "{b:02x}");
        }
        let _ = writeln!(out, "sha256 {hex} {name}");
    }
    std::fs::write(dir.join(MANIFEST_FILE), out)?;
    Ok(())
}

/// Persist everything produced by a full run into one directory.
pub fn write_all(
    dir: &Path,
    config: &ExperimentConfig,
    train: &Dataset,
    test: &Dataset,
    models: &TrainedModels,
    report: &EvaluationReport,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    std::fs::write(dir.join(CONFIG_FILE), config.to_text())?;
    files.push(CONFIG_FILE.to_string());
    files.extend(write_datasets(dir, train, test)?);
    files.extend(write_models(dir, models)?);
    report.save(&dir.join(REPORT_FILE))?;
    files.push(REPORT_FILE.to_string());
    files.extend(report.write_tables(dir)?);
    write_manifest(dir, config, files)?;
    Ok(())
}
