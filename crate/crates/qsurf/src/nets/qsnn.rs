//! Quantile-surface neural network: a shared MLP with one output head per
//! quantile level, trained with the pinball loss on direction-indexed vector
//! lengths.

use super::adam::{adam_step, AdamState};
use super::mlp::{Activation, Gradients, MlpModel};
use super::point::PointModel;
use super::TrainConfig;
use crate::directional::{decompose, forecast_adjust, QuantileSurfaceForecast};
use crate::error::{Error, Result};
use crate::numkit::Rng;
use serde::{Deserialize, Serialize};

/// Pinball (quantile) loss. Underprediction is weighted by tau,
/// overprediction by (1 - tau), so the expected loss is minimized at the
/// tau-quantile. The tie at prediction == observation belongs to the
/// overprediction branch.
pub fn pinball_loss(observation: f64, predicted: f64, tau: f64) -> f64 {
    let diff = predicted - observation;
    if diff >= 0.0 {
        (1.0 - tau) * diff
    } else {
        -tau * diff
    }
}

/// Subgradient of the pinball loss w.r.t. the prediction; the kink is
/// resolved to the (predicted - observation) >= 0 branch.
pub fn pinball_grad(observation: f64, predicted: f64, tau: f64) -> f64 {
    if predicted - observation >= 0.0 {
        1.0 - tau
    } else {
        -tau
    }
}

/// Quantile-surface network: MLP with L outputs over inputs
/// [direction components..., feature components...].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QsnnModel {
    pub mlp: MlpModel,
    pub levels: Vec<f64>,
    /// Target-space dimension K (number of direction input components).
    pub target_dim: usize,
}

impl QsnnModel {
    fn input(&self, direction: &[f64], features: &[f64]) -> Vec<f64> {
        let mut input = Vec::with_capacity(direction.len() + features.len());
        input.extend_from_slice(direction);
        input.extend_from_slice(features);
        input
    }

    /// The L head outputs after the clamp-to-zero and ascending-sort
    /// post-processing.
    pub fn radii_at(&self, direction: &[f64], features: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.mlp.forward(&self.input(direction, features))?;
        for r in out.iter_mut() {
            if *r < 0.0 {
                *r = 0.0;
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(out)
    }

    /// Single-direction radius, consistent with `predict_surface`.
    pub fn predict_radius(
        &self,
        direction: &[f64],
        features: &[f64],
        level_index: usize,
    ) -> Result<f64> {
        let radii = self.radii_at(direction, features)?;
        radii
            .get(level_index)
            .copied()
            .ok_or(Error::InvalidParameter(format!(
                "level index {level_index} out of range"
            )))
    }

    /// Evaluate all heads over a direction grid into a sampled surface.
    pub fn predict_surface(
        &self,
        point_estimate: &[f64],
        features: &[f64],
        directions: &[Vec<f64>],
    ) -> Result<QuantileSurfaceForecast> {
        let l = self.levels.len();
        let mut radii = vec![vec![0.0; directions.len()]; l];
        for (j, u) in directions.iter().enumerate() {
            let r = self.radii_at(u, features)?;
            for (i, radius) in r.into_iter().enumerate() {
                radii[i][j] = radius;
            }
        }
        Ok(QuantileSurfaceForecast {
            origin: point_estimate.to_vec(),
            levels: self.levels.clone(),
            directions: directions.to_vec(),
            radii,
        })
    }
}

/// One directional training sample: network input and observed length.
struct TrainSample {
    input: Vec<f64>,
    length: f64,
}

fn directional_samples(
    features: &[Vec<f64>],
    observations: &[Vec<f64>],
    point_model: &PointModel,
) -> Result<Vec<TrainSample>> {
    let mut samples = Vec::with_capacity(observations.len());
    for (i, obs) in observations.iter().enumerate() {
        let x = features.get(i).map(|f| f.as_slice()).unwrap_or(&[]);
        let estimate = point_model.predict(x)?;
        let adjusted = forecast_adjust(obs, &estimate)?;
        match decompose(&adjusted) {
            Ok(d) => {
                let mut input = d.direction;
                input.extend_from_slice(x);
                samples.push(TrainSample {
                    input,
                    length: d.length,
                });
            }
            // No direction exists for a zero residual; skip for training.
            Err(Error::DegenerateObservation) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(samples)
}

/// Train a QSNN minimizing
/// sum_i sum_l pinball(||o_i||, f^(l)(u_i, x_i)) + l2 * ||weights||^2.
/// Returns the model and the per-epoch training curve.
pub fn train_qsnn(
    features: &[Vec<f64>],
    observations: &[Vec<f64>],
    point_model: &PointModel,
    levels: &[f64],
    hidden: &[usize],
    activation: Activation,
    config: &TrainConfig,
) -> Result<(QsnnModel, Vec<f64>)> {
    if observations.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for w in levels.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidParameter("levels must be ascending".into()));
        }
    }
    if levels.is_empty() || levels[0] <= 0.0 || *levels.last().unwrap() >= 1.0 {
        return Err(Error::InvalidParameter("levels must lie in (0,1)".into()));
    }
    let samples = directional_samples(features, observations, point_model)?;
    if samples.is_empty() {
        return Err(Error::NoTrainableDirections);
    }
    let target_dim = observations[0].len();
    let feature_dim = features.first().map_or(0, |f| f.len());

    let mut sizes = vec![target_dim + feature_dim];
    sizes.extend_from_slice(hidden);
    sizes.push(levels.len());
    let mut rng = Rng::derive(config.seed, "qsnn-init");
    let mut mlp = MlpModel::new(&sizes, activation, &mut rng);
    let mut state = AdamState::new(&mlp);

    let batch_size = config.batch_size.unwrap_or(samples.len()).max(1);
    let mut curve = Vec::with_capacity(config.epochs);
    let mut out_grad = vec![0.0; levels.len()];
    for epoch in 0..config.epochs {
        let mut epoch_loss = 0.0;
        for batch in samples.chunks(batch_size) {
            let mut grads = Gradients::zeros_like(&mlp);
            for s in batch {
                let cache = mlp.forward_cached(&s.input)?;
                for ((g, &pred), &tau) in
                    out_grad.iter_mut().zip(cache.output()).zip(levels)
                {
                    *g = pinball_grad(s.length, pred, tau);
                    epoch_loss += pinball_loss(s.length, pred, tau);
                }
                grads.add_assign(&mlp.backward(&cache, &out_grad));
            }
            grads.add_l2(&mlp, config.l2);
            adam_step(
                &mut mlp,
                &grads,
                &mut state,
                config.learning_rate,
                config.beta1,
                config.beta2,
                config.epsilon,
            );
        }
        epoch_loss += config.l2 * mlp.weight_squared_norm();
        if !epoch_loss.is_finite() || !mlp.all_parameters_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        curve.push(epoch_loss);
    }
    Ok((
        QsnnModel {
            mlp,
            levels: levels.to_vec(),
            target_dim,
        },
        curve,
    ))
}
