//! From-scratch multilayer perceptrons with manual backpropagation, Adam,
//! the pinball loss and the QSNN training loop, plus deterministic
//! point-estimate models.

mod adam;
mod mlp;
pub mod persist;
mod point;
mod qsnn;

pub use adam::{adam_step, AdamState};
pub use mlp::{Activation, ForwardCache, Gradients, Layer, MlpModel};
pub use point::{fit_point_model, PointModel, PointModelKind};
pub use qsnn::{pinball_grad, pinball_loss, train_qsnn, QsnnModel};

use serde::{Deserialize, Serialize};

/// Training hyperparameters shared by all gradient-trained models.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// L2 coefficient on the weights (biases excluded), added to the total
    /// objective as l2 * sum(w^2).
    pub l2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// None = full batch.
    pub batch_size: Option<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 1000,
            learning_rate: 0.1,
            l2: 0.0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: None,
            seed: 0,
        }
    }
}
