//! Versioned model persistence. Models are stored as self-describing JSON
//! with shortest-roundtrip decimal floats, so load(save(m)) reproduces
//! predictions bit-identically.

use super::{PointModel, QsnnModel};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceNet, GaussianForecast};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SavedModel {
    Qsnn(QsnnModel),
    Point(PointModel),
    Gaussian(GaussianForecast),
    CovarianceNet(CovarianceNet),
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope {
    format_version: u32,
    model: SavedModel,
}

pub fn to_string(model: &SavedModel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Envelope {
        format_version: FORMAT_VERSION,
        model: model.clone(),
    })?)
}

pub fn from_str(s: &str) -> Result<SavedModel> {
    let envelope: Envelope = serde_json::from_str(s)?;
    if envelope.format_version != FORMAT_VERSION {
        return Err(Error::Config(format!(
            "unsupported model format version {}",
            envelope.format_version
        )));
    }
    Ok(envelope.model)
}

pub fn save(model: &SavedModel, path: &Path) -> Result<()> {
    std::fs::write(path, to_string(model)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<SavedModel> {
    let text = std::fs::read_to_string(path)?;
    from_str(&text)
}
