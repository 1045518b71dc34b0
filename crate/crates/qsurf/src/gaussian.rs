//! Gaussian baselines: unconditional maximum-likelihood covariance fit,
//! conditional covariance network, Mahalanobis geometry and directional
//! quantiles of Gaussian forecasts via the chi-square link.

use crate::error::{Error, Result};
use crate::nets::{adam_step, AdamState, Activation, Gradients, MlpModel, PointModel, TrainConfig};
use crate::numkit::{chi2_cdf, chi2_inverse_cdf, Matrix2, Rng};
use serde::{Deserialize, Serialize};

/// A bivariate Gaussian predictive distribution in forecast-adjusted space
/// (zero mean around the point estimate).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianForecast {
    pub mean: [f64; 2],
    pub covariance: Matrix2,
}

impl GaussianForecast {
    pub fn centered(covariance: Matrix2) -> Self {
        GaussianForecast {
            mean: [0.0, 0.0],
            covariance,
        }
    }
}

/// Maximum-likelihood unconditional Gaussian over forecast-adjusted
/// residuals: covariance = (1/N) sum of outer products, zero mean.
pub fn fit_unconditional(
    features: &[Vec<f64>],
    observations: &[Vec<f64>],
    point_model: &PointModel,
) -> Result<GaussianForecast> {
    if observations.len() < 3 {
        return Err(Error::EmptyDataset);
    }
    let n = observations.len() as f64;
    let mut cov = [[0.0f64; 2]; 2];
    for (i, obs) in observations.iter().enumerate() {
        let x = features.get(i).map(|f| f.as_slice()).unwrap_or(&[]);
        let estimate = point_model.predict(x)?;
        if obs.len() != 2 || estimate.len() != 2 {
            return Err(Error::UnsupportedDimension(obs.len()));
        }
        let r = [obs[0] - estimate[0], obs[1] - estimate[1]];
        for a in 0..2 {
            for b in 0..2 {
                cov[a][b] += r[a] * r[b] / n;
            }
        }
    }
    let covariance = Matrix2 { m: cov };
    if covariance.det() < 1e-12 {
        return Err(Error::SingularCovariance);
    }
    Ok(GaussianForecast::centered(covariance))
}

/// Mahalanobis distance of a point from the forecast mean.
pub fn mahalanobis(point: [f64; 2], forecast: &GaussianForecast) -> Result<f64> {
    let inv = forecast.covariance.inverse()?;
    let d = [point[0] - forecast.mean[0], point[1] - forecast.mean[1]];
    Ok(inv.quad_form(d).max(0.0).sqrt())
}

/// Radius of the tau-level Mahalanobis ellipse in a given direction:
/// sqrt(chi2_inv(tau, 2) / (u^T Sigma^-1 u)).
pub fn gaussian_directional_quantile(
    forecast: &GaussianForecast,
    direction: &[f64],
    tau: f64,
) -> Result<f64> {
    let inv = forecast.covariance.inverse()?;
    let q = inv.quad_form([direction[0], direction[1]]);
    if q <= 0.0 {
        return Err(Error::SingularCovariance);
    }
    Ok((chi2_inverse_cdf(tau, 2)? / q).sqrt())
}

/// Directional CDF of the vector length under the chi-square link:
/// F(length) = chi2_cdf(length^2 * u^T Sigma^-1 u, 2).
pub fn gaussian_directional_cdf(
    forecast: &GaussianForecast,
    direction: &[f64],
    length: f64,
) -> Result<f64> {
    if length < 0.0 {
        return Err(Error::Domain("length must be nonnegative".into()));
    }
    let inv = forecast.covariance.inverse()?;
    let q = inv.quad_form([direction[0], direction[1]]);
    chi2_cdf(length * length * q, 2)
}

/// Conditional Gaussian baseline: an MLP maps features to three raw outputs
/// decoded as (log sigma1, log sigma2, atanh correlation).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovarianceNet {
    pub mlp: MlpModel,
}

/// Decode raw network outputs into a symmetric positive definite covariance.
pub fn decode_covariance(raw: &[f64]) -> Matrix2 {
    let s1 = raw[0].exp();
    let s2 = raw[1].exp();
    let rho = raw[2].tanh();
    let off = rho * s1 * s2;
    Matrix2::new(s1 * s1, off, off, s2 * s2)
}

impl CovarianceNet {
    pub fn predict(&self, features: &[f64]) -> Result<Matrix2> {
        Ok(decode_covariance(&self.mlp.forward(features)?))
    }

    pub fn forecast(&self, features: &[f64]) -> Result<GaussianForecast> {
        Ok(GaussianForecast::centered(self.predict(features)?))
    }
}

/// Zero-mean bivariate Gaussian negative log-likelihood of a residual under
/// the covariance decoded from `raw`, plus its gradient w.r.t. the three raw
/// outputs. Constant terms (log 2 pi) are dropped.
pub fn covariance_nll_and_grad(raw: &[f64], residual: [f64; 2]) -> (f64, [f64; 3]) {
    let s1 = raw[0].exp();
    let s2 = raw[1].exp();
    let rho = raw[2].tanh();
    let z1 = residual[0] / s1;
    let z2 = residual[1] / s2;
    let one_m = 1.0 - rho * rho;
    let q = (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / one_m;
    // log det = 2a + 2b + ln(1 - rho^2)
    let nll = 0.5 * (2.0 * raw[0] + 2.0 * raw[1] + one_m.ln() + q);
    let da = 1.0 - z1 * (z1 - rho * z2) / one_m;
    let db = 1.0 - z2 * (z2 - rho * z1) / one_m;
    // d/dc with drho/dc = 1 - rho^2 folded in
    let dc = rho * (q - 1.0) - z1 * z2;
    (nll, [da, db, dc])
}

/// Fit a conditional covariance network by minimizing the mean Gaussian NLL
/// of forecast-adjusted observations. Returns the net and the per-epoch loss.
pub fn fit_conditional(
    features: &[Vec<f64>],
    observations: &[Vec<f64>],
    point_model: &PointModel,
    hidden: &[usize],
    config: &TrainConfig,
) -> Result<(CovarianceNet, Vec<f64>)> {
    if observations.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let feature_dim = features.first().map_or(0, |f| f.len());
    let mut residuals = Vec::with_capacity(observations.len());
    for (i, obs) in observations.iter().enumerate() {
        let x = features.get(i).map(|f| f.as_slice()).unwrap_or(&[]);
        let estimate = point_model.predict(x)?;
        residuals.push([obs[0] - estimate[0], obs[1] - estimate[1]]);
    }
    let mut sizes = vec![feature_dim];
    sizes.extend_from_slice(hidden);
    sizes.push(3);
    let mut rng = Rng::derive(config.seed, "covnet-init");
    let mut mlp = MlpModel::new(&sizes, Activation::Tanh, &mut rng);
    let mut state = AdamState::new(&mlp);
    let n = residuals.len() as f64;
    let mut curve = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut grads = Gradients::zeros_like(&mlp);
        let mut loss = 0.0;
        for (x, r) in features.iter().zip(&residuals) {
            let cache = mlp.forward_cached(x)?;
            let (nll, raw_grad) = covariance_nll_and_grad(cache.output(), *r);
            loss += nll / n;
            let out_grad: Vec<f64> = raw_grad.iter().map(|g| g / n).collect();
            grads.add_assign(&mlp.backward(&cache, &out_grad));
        }
        loss += config.l2 * mlp.weight_squared_norm();
        if !loss.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
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
        curve.push(loss);
    }
    Ok((CovarianceNet { mlp }, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{cholesky2, sample_standard_normal};

    fn sample_gaussian(cov: &Matrix2, n: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
        let l = cholesky2(cov).unwrap();
        (0..n)
            .map(|_| {
                let z = [sample_standard_normal(rng), sample_standard_normal(rng)];
                let v = [
                    l.m[0][0] * z[0],
                    l.m[1][0] * z[0] + l.m[1][1] * z[1],
                ];
                vec![v[0], v[1]]
            })
            .collect()
    }

    #[test]
    fn mle_recovers_diagonal_covariance() {
        let mut rng = Rng::new(21);
        let obs = sample_gaussian(&Matrix2::diag(0.5, 2.0), 100_000, &mut rng);
        let point = PointModel::Constant(vec![0.0, 0.0]);
        let g = fit_unconditional(&[], &obs, &point).unwrap();
        assert!((g.covariance.m[0][0] - 0.5).abs() < 0.02);
        assert!((g.covariance.m[1][1] - 2.0).abs() < 0.02);
        assert!(g.covariance.m[0][1].abs() < 0.02);
    }

    #[test]
    fn mle_rejects_degenerate_residuals() {
        let obs = vec![vec![1.0, 2.0], vec![-1.0, -2.0], vec![2.0, 4.0]];
        let point = PointModel::Constant(vec![0.0, 0.0]);
        assert!(matches!(
            fit_unconditional(&[], &obs, &point),
            Err(Error::SingularCovariance)
        ));
    }

    #[test]
    fn mle_scales_quadratically() {
        let mut rng = Rng::new(22);
        let obs = sample_gaussian(&Matrix2::diag(1.0, 1.0), 2000, &mut rng);
        let scaled: Vec<Vec<f64>> = obs.iter().map(|o| vec![3.0 * o[0], 3.0 * o[1]]).collect();
        let point = PointModel::Constant(vec![0.0, 0.0]);
        let a = fit_unconditional(&[], &obs, &point).unwrap();
        let b = fit_unconditional(&[], &scaled, &point).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((b.covariance.m[i][j] - 9.0 * a.covariance.m[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mahalanobis_values() {
        let g = GaussianForecast::centered(Matrix2::identity());
        assert_eq!(mahalanobis([0.0, 0.0], &g).unwrap(), 0.0);
        assert!((mahalanobis([3.0, 4.0], &g).unwrap() - 5.0).abs() < 1e-12);
        let g = GaussianForecast::centered(Matrix2::diag(4.0, 1.0));
        assert!((mahalanobis([2.0, 0.0], &g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn directional_quantile_closed_forms() {
        let g = GaussianForecast::centered(Matrix2::identity());
        let expect = 4.605170185988091f64.sqrt();
        for angle in [0.0f64, 0.9, 2.2, 4.7] {
            let r =
                gaussian_directional_quantile(&g, &[angle.cos(), angle.sin()], 0.9).unwrap();
            assert!((r - expect).abs() < 1e-4);
        }
        let g = GaussianForecast::centered(Matrix2::diag(0.5, 2.0));
        let r = gaussian_directional_quantile(&g, &[1.0, 0.0], 0.9).unwrap();
        assert!((r - 0.5f64.sqrt() * expect).abs() < 1e-9);
        let lo = gaussian_directional_quantile(&g, &[0.6, 0.8], 0.5).unwrap();
        let hi = gaussian_directional_quantile(&g, &[0.6, 0.8], 0.9).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn directional_cdf_round_trip() {
        let g = GaussianForecast::centered(Matrix2::new(1.2, 0.3, 0.3, 0.8));
        assert_eq!(gaussian_directional_cdf(&g, &[1.0, 0.0], 0.0).unwrap(), 0.0);
        for angle in [0.0f64, 1.1, 2.7] {
            let u = [angle.cos(), angle.sin()];
            for tau in [0.1, 0.5, 0.7, 0.95] {
                let q = gaussian_directional_quantile(&g, &u, tau).unwrap();
                let back = gaussian_directional_cdf(&g, &u, q).unwrap();
                assert!((back - tau).abs() < 1e-8, "tau {tau} back {back}");
            }
        }
        let iso = GaussianForecast::centered(Matrix2::identity());
        let c = gaussian_directional_cdf(&iso, &[0.0, 1.0], 2.1460).unwrap();
        assert!((c - 0.9).abs() < 1e-4);
    }

    #[test]
    fn ellipse_polygon_area_converges() {
        // area of the tau-ellipse: pi * sqrt(det Sigma) * chi2_inv(tau, 2)
        let cov = Matrix2::new(0.9, 0.4, 0.4, 1.7);
        let g = GaussianForecast::centered(cov);
        let tau = 0.9;
        let d = 3600;
        let grid = crate::directional::direction_grid(d).unwrap();
        let radii: Vec<f64> = grid
            .iter()
            .map(|u| gaussian_directional_quantile(&g, u, tau).unwrap())
            .collect();
        let surface = crate::directional::QuantileSurfaceForecast {
            origin: vec![0.0, 0.0],
            levels: vec![tau],
            directions: grid,
            radii: vec![radii],
        };
        let area = crate::directional::polygon_area(&surface, 0).unwrap();
        let expect = std::f64::consts::PI * cov.det().sqrt() * chi2_inverse_cdf(tau, 2).unwrap();
        assert!((area - expect).abs() / expect < 1e-4, "area {area} expect {expect}");
    }

    #[test]
    fn nll_gradient_matches_finite_differences() {
        let mut rng = Rng::new(30);
        for _ in 0..50 {
            let raw = [
                rng.next_f64() - 0.5,
                rng.next_f64() - 0.5,
                (rng.next_f64() - 0.5) * 2.0,
            ];
            let res = [
                2.0 * (rng.next_f64() - 0.5),
                2.0 * (rng.next_f64() - 0.5),
            ];
            let (_, grad) = covariance_nll_and_grad(&raw, res);
            let h = 1e-6;
            for k in 0..3 {
                let mut plus = raw;
                plus[k] += h;
                let mut minus = raw;
                minus[k] -= h;
                let fd = (covariance_nll_and_grad(&plus, res).0
                    - covariance_nll_and_grad(&minus, res).0)
                    / (2.0 * h);
                let rel = (fd - grad[k]).abs() / fd.abs().max(grad[k].abs()).max(1e-8);
                assert!(rel < 1e-4, "k={k} fd={fd} an={}", grad[k]);
            }
        }
    }

    #[test]
    fn conditional_fit_matches_unconditional_on_homoscedastic_data() {
        let mut rng = Rng::new(31);
        let cov = Matrix2::diag(1.0, 2.5);
        let obs = sample_gaussian(&cov, 600, &mut rng);
        let features: Vec<Vec<f64>> = (0..600).map(|i| vec![(i % 2) as f64]).collect();
        let point = PointModel::Constant(vec![0.0, 0.0]);
        let mle = fit_unconditional(&features, &obs, &point).unwrap();
        let cfg = TrainConfig {
            epochs: 4000,
            learning_rate: 0.01,
            l2: 0.0,
            seed: 32,
            ..TrainConfig::default()
        };
        let (net, curve) = fit_conditional(&features, &obs, &point, &[8], &cfg).unwrap();
        assert!(curve.iter().all(|l| l.is_finite()));
        for x in [[0.0], [1.0]] {
            let decoded = net.predict(&x).unwrap();
            for i in 0..2 {
                let rel = (decoded.m[i][i] - mle.covariance.m[i][i]).abs()
                    / mle.covariance.m[i][i];
                assert!(rel < 0.10, "var[{i}] {} vs {}", decoded.m[i][i], mle.covariance.m[i][i]);
            }
        }
    }

    #[test]
    fn decoded_covariance_is_always_spd() {
        let mut rng = Rng::new(33);
        for _ in 0..200 {
            let raw = [
                (rng.next_f64() - 0.5) * 10.0,
                (rng.next_f64() - 0.5) * 10.0,
                (rng.next_f64() - 0.5) * 20.0,
            ];
            let cov = decode_covariance(&raw);
            assert!(cholesky2(&cov).is_ok(), "raw {raw:?}");
        }
    }
}
