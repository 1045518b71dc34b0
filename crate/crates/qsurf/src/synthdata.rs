//! Synthetic experiment generators with known ground-truth directional
//! quantiles: an anisotropic Gaussian (MGD), a rotated skewed distribution
//! (SMD) and a feature-conditional Gaussian (CMGD).

use crate::error::{Error, Result};
use crate::gaussian::{gaussian_directional_quantile, GaussianForecast};
use crate::numkit::{sample_exponential, sample_standard_normal, Matrix2, Rng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyntheticKind {
    Mgd,
    Smd,
    Cmgd,
}

impl std::str::FromStr for SyntheticKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mgd" => Ok(SyntheticKind::Mgd),
            "smd" => Ok(SyntheticKind::Smd),
            "cmgd" => Ok(SyntheticKind::Cmgd),
            other => Err(Error::Config(format!("unknown preset '{other}'"))),
        }
    }
}

impl std::fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SyntheticKind::Mgd => write!(f, "mgd"),
            SyntheticKind::Smd => write!(f, "smd"),
            SyntheticKind::Cmgd => write!(f, "cmgd"),
        }
    }
}

pub const MGD_VAR_1: f64 = 0.5;
pub const MGD_VAR_2: f64 = 2.0;
pub const SMD_NORMAL_MEAN: f64 = 1.0;
pub const SMD_NORMAL_STD: f64 = 3.0;
pub const SMD_EXP_SCALE: f64 = 4.0;
pub const CMGD_VAR_1_COND0: f64 = 0.5;
pub const CMGD_VAR_2_COND0: f64 = 7.5;
pub const CMGD_VAR_1_COND1: f64 = 5.0;
pub const CMGD_VAR_2_COND1: f64 = 0.5;

/// Zero-mean Gaussian with variances (0.5, 2) and no cross-covariance.
pub fn gen_mgd(rng: &mut Rng, n: usize) -> Vec<Vec<f64>> {
    let (s1, s2) = (MGD_VAR_1.sqrt(), MGD_VAR_2.sqrt());
    (0..n)
        .map(|_| {
            vec![
                s1 * sample_standard_normal(rng),
                s2 * sample_standard_normal(rng),
            ]
        })
        .collect()
}

/// Skewed distribution: (Normal(1, 3), Exponential(scale 4)) rotated 45
/// degrees counterclockwise.
pub fn gen_smd(rng: &mut Rng, n: usize) -> Vec<Vec<f64>> {
    let (c, s) = (std::f64::consts::FRAC_PI_4.cos(), std::f64::consts::FRAC_PI_4.sin());
    (0..n)
        .map(|_| {
            let y1 = SMD_NORMAL_MEAN + SMD_NORMAL_STD * sample_standard_normal(rng);
            let y2 = sample_exponential(rng, SMD_EXP_SCALE).expect("positive scale");
            vec![c * y1 - s * y2, s * y1 + c * y2]
        })
        .collect()
}

fn cmgd_covariance(condition: f64) -> Matrix2 {
    if condition == 0.0 {
        Matrix2::diag(CMGD_VAR_1_COND0, CMGD_VAR_2_COND0)
    } else {
        Matrix2::diag(CMGD_VAR_1_COND1, CMGD_VAR_2_COND1)
    }
}

/// Conditional Gaussian: covariance depends on a binary feature, conditions
/// interleaved 0,1,0,1,... with exactly n/2 samples each.
pub fn gen_cmgd(rng: &mut Rng, n: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    if n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "cmgd sample count must be even, got {n}"
        )));
    }
    let mut features = Vec::with_capacity(n);
    let mut observations = Vec::with_capacity(n);
    for i in 0..n {
        let cond = (i % 2) as f64;
        let cov = cmgd_covariance(cond);
        features.push(vec![cond]);
        observations.push(vec![
            cov.m[0][0].sqrt() * sample_standard_normal(rng),
            cov.m[1][1].sqrt() * sample_standard_normal(rng),
        ]);
    }
    Ok((features, observations))
}

/// Ground-truth generating covariance for the Gaussian kinds.
pub fn true_covariance(kind: SyntheticKind, features: &[f64]) -> Result<Matrix2> {
    match kind {
        SyntheticKind::Mgd => Ok(Matrix2::diag(MGD_VAR_1, MGD_VAR_2)),
        SyntheticKind::Cmgd => {
            let cond = *features.first().ok_or(Error::InvalidParameter(
                "cmgd needs the binary condition feature".into(),
            ))?;
            Ok(cmgd_covariance(cond))
        }
        SyntheticKind::Smd => Err(Error::InvalidParameter(
            "smd has no analytic covariance oracle; use empirical quantiles".into(),
        )),
    }
}

/// Analytic directional quantile of the data-generating process (Gaussian
/// kinds only).
pub fn true_directional_quantile(
    kind: SyntheticKind,
    features: &[f64],
    direction: &[f64],
    tau: f64,
) -> Result<f64> {
    let forecast = GaussianForecast::centered(true_covariance(kind, features)?);
    gaussian_directional_quantile(&forecast, direction, tau)
}
