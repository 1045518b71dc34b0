//! Deterministic point-estimate models: the first stage of the two-stage
//! forecasting pipeline.

use super::mlp::{Activation, Gradients, MlpModel};
use super::adam::{adam_step, AdamState};
use super::TrainConfig;
use crate::error::{Error, Result};
use crate::numkit::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum PointModel {
    /// Unconditional sample mean.
    Constant(Vec<f64>),
    /// Linear least-squares map, weights[k][m] plus bias per output.
    Linear {
        weights: Vec<Vec<f64>>,
        bias: Vec<f64>,
    },
    Mlp(MlpModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointModelKind {
    Mean,
    Linear,
    Mlp,
}

impl PointModel {
    pub fn predict(&self, features: &[f64]) -> Result<Vec<f64>> {
        match self {
            PointModel::Constant(c) => Ok(c.clone()),
            PointModel::Linear { weights, bias } => {
                if !weights.is_empty() && weights[0].len() != features.len() {
                    return Err(Error::DimensionMismatch {
                        expected: weights[0].len(),
                        got: features.len(),
                    });
                }
                Ok(weights
                    .iter()
                    .zip(bias)
                    .map(|(wrow, b)| {
                        wrow.iter().zip(features).map(|(w, x)| w * x).sum::<f64>() + b
                    })
                    .collect())
            }
            PointModel::Mlp(m) => m.forward(features),
        }
    }
}

/// Solve a small symmetric linear system with Gaussian elimination and
/// partial pivoting.
fn solve_linear_system(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::SingularCovariance);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

/// Fit the deterministic point model. Empty features (or kind Mean) fit the
/// sample mean; Linear fits least squares; Mlp minimizes mean squared
/// Euclidean error with Adam.
pub fn fit_point_model(
    features: &[Vec<f64>],
    observations: &[Vec<f64>],
    kind: PointModelKind,
    hidden: &[usize],
    config: &TrainConfig,
) -> Result<PointModel> {
    if observations.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let target_dim = observations[0].len();
    let feature_dim = features.first().map_or(0, |f| f.len());
    let effective_kind = if feature_dim == 0 {
        PointModelKind::Mean
    } else {
        kind
    };
    match effective_kind {
        PointModelKind::Mean => {
            let n = observations.len() as f64;
            let mut mean = vec![0.0; target_dim];
            for o in observations {
                for (m, x) in mean.iter_mut().zip(o) {
                    *m += x / n;
                }
            }
            Ok(PointModel::Constant(mean))
        }
        PointModelKind::Linear => {
            // Normal equations over the bias-augmented design matrix.
            let p = feature_dim + 1;
            let mut ata = vec![vec![0.0; p]; p];
            let mut aty = vec![vec![0.0; target_dim]; p];
            let mut row = vec![0.0; p];
            for (x, y) in features.iter().zip(observations) {
                row[..feature_dim].copy_from_slice(x);
                row[feature_dim] = 1.0;
                for i in 0..p {
                    for j in 0..p {
                        ata[i][j] += row[i] * row[j];
                    }
                    for k in 0..target_dim {
                        aty[i][k] += row[i] * y[k];
                    }
                }
            }
            let mut weights = vec![vec![0.0; feature_dim]; target_dim];
            let mut bias = vec![0.0; target_dim];
            for k in 0..target_dim {
                let rhs: Vec<f64> = (0..p).map(|i| aty[i][k]).collect();
                let beta = solve_linear_system(ata.clone(), rhs)?;
                weights[k].copy_from_slice(&beta[..feature_dim]);
                bias[k] = beta[feature_dim];
            }
            Ok(PointModel::Linear { weights, bias })
        }
        PointModelKind::Mlp => {
            let mut sizes = vec![feature_dim];
            sizes.extend_from_slice(hidden);
            sizes.push(target_dim);
            let mut rng = Rng::derive(config.seed, "point-mlp-init");
            let mut model = MlpModel::new(&sizes, Activation::Tanh, &mut rng);
            let mut state = AdamState::new(&model);
            for epoch in 0..config.epochs {
                let mut grads = Gradients::zeros_like(&model);
                let mut loss = 0.0;
                for (x, y) in features.iter().zip(observations) {
                    let cache = model.forward_cached(x)?;
                    let out_grad: Vec<f64> = cache
                        .output()
                        .iter()
                        .zip(y)
                        .map(|(a, b)| 2.0 * (a - b))
                        .collect();
                    loss += cache
                        .output()
                        .iter()
                        .zip(y)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>();
                    grads.add_assign(&model.backward(&cache, &out_grad));
                }
                if !loss.is_finite() {
                    return Err(Error::TrainingDiverged { epoch });
                }
                grads.add_l2(&model, config.l2);
                adam_step(
                    &mut model,
                    &grads,
                    &mut state,
                    config.learning_rate,
                    config.beta1,
                    config.beta2,
                    config.epsilon,
                );
            }
            Ok(PointModel::Mlp(model))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconditional_mean() {
        let obs = vec![vec![1.0, 1.0], vec![3.0, 3.0]];
        let m = fit_point_model(&[], &obs, PointModelKind::Mean, &[], &TrainConfig::default())
            .unwrap();
        assert_eq!(m.predict(&[]).unwrap(), vec![2.0, 2.0]);
        assert!(fit_point_model(&[], &[], PointModelKind::Mean, &[], &TrainConfig::default())
            .is_err());
    }

    #[test]
    fn linear_recovers_exact_line() {
        // y = 2x + 1
        let features: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.25]).collect();
        let obs: Vec<Vec<f64>> = features.iter().map(|x| vec![2.0 * x[0] + 1.0]).collect();
        let m = fit_point_model(
            &features,
            &obs,
            PointModelKind::Linear,
            &[],
            &TrainConfig::default(),
        )
        .unwrap();
        match &m {
            PointModel::Linear { weights, bias } => {
                assert!((weights[0][0] - 2.0).abs() < 1e-6);
                assert!((bias[0] - 1.0).abs() < 1e-6);
            }
            _ => panic!("expected linear model"),
        }
    }

    #[test]
    fn mlp_on_constant_targets_learns_the_mean() {
        let features: Vec<Vec<f64>> = (0..16).map(|i| vec![(i % 4) as f64 * 0.3]).collect();
        let obs: Vec<Vec<f64>> = (0..16).map(|_| vec![0.7]).collect();
        let cfg = TrainConfig {
            epochs: 5000,
            learning_rate: 0.01,
            l2: 0.0,
            seed: 3,
            ..TrainConfig::default()
        };
        let m = fit_point_model(&features, &obs, PointModelKind::Mlp, &[8], &cfg).unwrap();
        for x in &features {
            let y = m.predict(x).unwrap()[0];
            assert!((y - 0.7).abs() < 1e-3, "y {y}");
        }
    }
}
