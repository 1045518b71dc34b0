//! Evaluation report: aggregated scores per model plus the CSV emitters.

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::metrics::{ReliabilityCurve, SharpnessCurve};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrpsRow {
    pub sample_id: usize,
    /// Angle of the observation's direction w.r.t. the first axis, radians.
    pub direction_angle: f64,
    pub length: f64,
    pub crps: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: String,
    pub reliability: ReliabilityCurve,
    pub sharpness: SharpnessCurve,
    pub per_sample_crps: Vec<CrpsRow>,
    pub avg_crps: f64,
    /// Skill vs the unconditional Gaussian baseline; None for the baseline
    /// itself when it is the only model.
    pub skill_vs_baseline: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub models: Vec<ModelReport>,
}

fn fmt_f64(x: f64) -> String {
    // shortest decimal that round-trips; stable across runs
    format!("{x}")
}

impl EvaluationReport {
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("model,avg_crps,skill_vs_baseline\n");
        for m in &self.models {
            let skill = m
                .skill_vs_baseline
                .map_or(String::new(), |s| fmt_f64(s));
            let _ = writeln!(out, "{},{},{}", m.model, fmt_f64(m.avg_crps), skill);
        }
        out
    }

    /// Write reliability_<model>.csv, sharpness_<model>.csv,
    /// crps_<model>.csv and summary.csv into a directory. Returns the
    /// relative names of the files written.
    pub fn write_tables(&self, dir: &Path) -> Result<Vec<String>> {
        let mut written = Vec::new();
        for m in &self.models {
            let mut rel = String::from("level,frequency\n");
            for (tau, freq) in &m.reliability.points {
                let _ = writeln!(rel, "{},{}", fmt_f64(*tau), fmt_f64(*freq));
            }
            let name = format!("reliability_{}.csv", m.model);
            std::fs::write(dir.join(&name), rel)?;
            written.push(name);

            let mut sharp = String::from("coverage,mean_area\n");
            for (coverage, area) in &m.sharpness.points {
                let _ = writeln!(sharp, "{},{}", fmt_f64(*coverage), fmt_f64(*area));
            }
            let name = format!("sharpness_{}.csv", m.model);
            std::fs::write(dir.join(&name), sharp)?;
            written.push(name);

            let mut crps = String::from("sample_id,direction_angle,length,crps\n");
            for row in &m.per_sample_crps {
                let _ = writeln!(
                    crps,
                    "{},{},{},{}",
                    row.sample_id,
                    fmt_f64(row.direction_angle),
                    fmt_f64(row.length),
                    fmt_f64(row.crps)
                );
            }
            let name = format!("crps_{}.csv", m.model);
            std::fs::write(dir.join(&name), crps)?;
            written.push(name);
        }
        std::fs::write(dir.join("summary.csv"), self.summary_csv())?;
        written.push("summary.csv".to_string());
        Ok(written)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Dataset CSV with feature columns first, then target columns.
pub fn dataset_csv(features: &[Vec<f64>], observations: &[Vec<f64>]) -> String {
    let feature_dim = features.first().map_or(0, |f| f.len());
    let target_dim = observations.first().map_or(0, |o| o.len());
    let mut header: Vec<String> = (0..feature_dim).map(|i| format!("feature_{i}")).collect();
    header.extend((0..target_dim).map(|i| format!("target_{i}")));
    let mut out = header.join(",");
    out.push('\n');
    for (i, obs) in observations.iter().enumerate() {
        let mut row: Vec<String> = Vec::with_capacity(feature_dim + target_dim);
        if let Some(f) = features.get(i) {
            row.extend(f.iter().map(|x| fmt_f64(*x)));
        }
        row.extend(obs.iter().map(|x| fmt_f64(*x)));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parse a dataset CSV produced by `dataset_csv`.
pub fn parse_dataset_csv(text: &str) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    use crate::error::Error;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty dataset csv".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let feature_dim = cols.iter().filter(|c| c.starts_with("feature_")).count();
    let target_dim = cols.iter().filter(|c| c.starts_with("target_")).count();
    if feature_dim + target_dim != cols.len() || target_dim == 0 {
        return Err(Error::Config("unrecognized dataset csv header".into()));
    }
    let mut features = Vec::new();
    let mut observations = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let values = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number at data line {}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != cols.len() {
            return Err(Error::Config(format!(
                "wrong column count at data line {}",
                lineno + 1
            )));
        }
        features.push(values[..feature_dim].to_vec());
        observations.push(values[feature_dim..].to_vec());
    }
    Ok((features, observations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_csv_round_trip() {
        let features = vec![vec![0.0], vec![1.0]];
        let obs = vec![vec![1.5, -2.25], vec![0.125, 3.0]];
        let text = dataset_csv(&features, &obs);
        let (f, o) = parse_dataset_csv(&text).unwrap();
        assert_eq!(f, features);
        assert_eq!(o, obs);
    }

    #[test]
    fn dataset_csv_without_features() {
        let obs = vec![vec![1.0, 2.0]];
        let text = dataset_csv(&[], &obs);
        assert!(text.starts_with("target_0,target_1\n"));
        let (f, o) = parse_dataset_csv(&text).unwrap();
        assert!(f.iter().all(|x| x.is_empty()));
        assert_eq!(o, obs);
    }
}
