//! Quantile-surface (QS) forecasting.
//!
//! A multivariate probabilistic forecast is built in two stages: a
//! deterministic point estimate, then a quantile-surface neural network
//! (QSNN) that regresses direction-indexed vector lengths with the pinball
//! loss. Forecasts are star-domain surfaces sampled over a direction grid
//! and are evaluated with reliability, sharpness, directional CRPS and skill
//! against Gaussian baselines.
//!
//! See the `examples/` directory for runnable walkthroughs of each
//! capability; the `qsurf` binary drives full experiments.

pub mod directional;
pub mod error;
pub mod gaussian;
pub mod harness;
pub mod metrics;
pub mod nets;
pub mod numkit;
pub mod synthdata;

pub use error::{Error, Result};
