//! Experiment orchestration: dataset generation, two-stage training and
//! evaluation against the Gaussian baselines.

use super::config::ExperimentConfig;
use super::report::{CrpsRow, EvaluationReport, ModelReport};
use crate::directional::{decompose, direction_grid, forecast_adjust, QuantileSurfaceForecast};
use crate::error::{Error, Result};
use crate::gaussian::{
    fit_conditional, fit_unconditional, gaussian_directional_quantile, CovarianceNet,
    GaussianForecast,
};
use crate::metrics::{
    average_directional_crps, reliability_curve, sharpness_curve, skill, DirectionalCdf,
};
use crate::nets::{fit_point_model, train_qsnn, PointModel, QsnnModel};
use crate::numkit::Rng;
use crate::synthdata::{gen_cmgd, gen_mgd, gen_smd, SyntheticKind};

pub const BASELINE_MODEL: &str = "gaussian_unconditional";
pub const CONDITIONAL_MODEL: &str = "gaussian_conditional";
pub const QSNN_MODEL: &str = "qsnn";

pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub observations: Vec<Vec<f64>>,
}

/// Draw train and test splits from the configured generator.
pub fn generate_datasets(config: &ExperimentConfig) -> Result<(Dataset, Dataset)> {
    let draw = |tag: &str, n: usize| -> Result<Dataset> {
        let mut rng = Rng::derive(config.seed, tag);
        Ok(match config.preset {
            SyntheticKind::Mgd => Dataset {
                features: Vec::new(),
                observations: gen_mgd(&mut rng, n),
            },
            SyntheticKind::Smd => Dataset {
                features: Vec::new(),
                observations: gen_smd(&mut rng, n),
            },
            SyntheticKind::Cmgd => {
                let (features, observations) = gen_cmgd(&mut rng, n)?;
                Dataset {
                    features,
                    observations,
                }
            }
        })
    };
    Ok((draw("train", config.n_train)?, draw("test", config.n_test)?))
}

pub struct TrainedModels {
    pub point: PointModel,
    pub qsnn: QsnnModel,
    pub qsnn_curve: Vec<f64>,
    pub gaussian: GaussianForecast,
    pub covnet: Option<CovarianceNet>,
}

/// Fit the point model, the QSNN and the requested Gaussian baselines on the
/// training split.
pub fn fit_models(config: &ExperimentConfig, train: &Dataset) -> Result<TrainedModels> {
    let point = fit_point_model(
        &train.features,
        &train.observations,
        config.point_model_kind(),
        &config.hidden,
        &config.train_config(),
    )
    .map_err(|e| e.at_stage("point model fit"))?;

    let (qsnn, qsnn_curve) = train_qsnn(
        &train.features,
        &train.observations,
        &point,
        &config.levels,
        &config.hidden,
        config.activation,
        &config.train_config(),
    )
    .map_err(|e| e.at_stage("qsnn training"))?;

    let gaussian = fit_unconditional(&train.features, &train.observations, &point)
        .map_err(|e| e.at_stage("unconditional gaussian fit"))?;

    let covnet = if config.conditional_baseline {
        let mut cfg = config.train_config();
        // NLL is per-sample averaged; the preset lr 0.1 is tuned for the
        // summed pinball objective and overshoots here.
        cfg.learning_rate = cfg.learning_rate.min(0.01);
        cfg.l2 = 0.0;
        let (net, _) =
            fit_conditional(&train.features, &train.observations, &point, &config.hidden, &cfg)
                .map_err(|e| e.at_stage("conditional gaussian fit"))?;
        Some(net)
    } else {
        None
    };

    Ok(TrainedModels {
        point,
        qsnn,
        qsnn_curve,
        gaussian,
        covnet,
    })
}

/// One evaluated forecasting model: radii per level at a given direction.
enum EvalModel<'a> {
    Qsnn(&'a QsnnModel),
    Gaussian(&'a GaussianForecast),
    CovNet(&'a CovarianceNet),
}

impl EvalModel<'_> {
    fn radii(&self, direction: &[f64], features: &[f64], levels: &[f64]) -> Result<Vec<f64>> {
        match self {
            EvalModel::Qsnn(m) => m.radii_at(direction, features),
            EvalModel::Gaussian(g) => levels
                .iter()
                .map(|&tau| gaussian_directional_quantile(g, direction, tau))
                .collect(),
            EvalModel::CovNet(net) => {
                let g = net.forecast(features)?;
                levels
                    .iter()
                    .map(|&tau| gaussian_directional_quantile(&g, direction, tau))
                    .collect()
            }
        }
    }

    fn is_conditional(&self, feature_dim: usize) -> bool {
        match self {
            EvalModel::Gaussian(_) => false,
            EvalModel::Qsnn(_) | EvalModel::CovNet(_) => feature_dim > 0,
        }
    }
}

struct DirectionalSample {
    features: Vec<f64>,
    direction: Vec<f64>,
    length: f64,
    angle: f64,
}

fn directional_test_samples(point: &PointModel, test: &Dataset) -> Result<Vec<DirectionalSample>> {
    let mut out = Vec::with_capacity(test.observations.len());
    for (i, obs) in test.observations.iter().enumerate() {
        let x = test.features.get(i).cloned().unwrap_or_default();
        let estimate = point.predict(&x)?;
        let adjusted = forecast_adjust(obs, &estimate)?;
        let (direction, length) = match decompose(&adjusted) {
            Ok(d) => (d.direction, d.length),
            // an observation exactly at the point estimate has no direction;
            // it is contained in every surface, so any direction scores it
            Err(Error::DegenerateObservation) => {
                let mut dir = vec![0.0; obs.len()];
                dir[0] = 1.0;
                (dir, 0.0)
            }
            Err(e) => return Err(e),
        };
        let angle = direction[1].atan2(direction[0]);
        out.push(DirectionalSample {
            features: x,
            direction,
            length,
            angle,
        });
    }
    Ok(out)
}

fn evaluate_model(
    name: &str,
    model: &EvalModel,
    config: &ExperimentConfig,
    samples: &[DirectionalSample],
) -> Result<ModelReport> {
    let levels = &config.levels;
    let n = samples.len();
    let mut radii_per_level = vec![vec![0.0; n]; levels.len()];
    let mut cdfs = Vec::with_capacity(n);
    let mut lengths = Vec::with_capacity(n);
    let mut per_sample_crps = Vec::with_capacity(n);
    for (i, s) in samples.iter().enumerate() {
        let radii = model.radii(&s.direction, &s.features, levels)?;
        for (l, &r) in radii.iter().enumerate() {
            radii_per_level[l][i] = r;
        }
        let cdf = DirectionalCdf::from_quantiles(levels, &radii)?;
        let crps = cdf.crps(s.length)?;
        per_sample_crps.push(CrpsRow {
            sample_id: i,
            direction_angle: s.angle,
            length: s.length,
            crps,
        });
        cdfs.push(cdf);
        lengths.push(s.length);
    }
    let reliability = reliability_curve(levels, &radii_per_level, &lengths)?;
    let avg_crps = average_directional_crps(&cdfs, &lengths)?;

    // Sharpness over the direction grid; unconditional models issue one
    // surface, so compute it once.
    let grid = direction_grid(config.directions)?;
    let feature_dim = samples.first().map_or(0, |s| s.features.len());
    let surface_for = |features: &[f64]| -> Result<QuantileSurfaceForecast> {
        let mut radii = vec![vec![0.0; grid.len()]; levels.len()];
        for (j, u) in grid.iter().enumerate() {
            for (l, r) in model.radii(u, features, levels)?.into_iter().enumerate() {
                radii[l][j] = r;
            }
        }
        Ok(QuantileSurfaceForecast {
            origin: vec![0.0, 0.0],
            levels: levels.clone(),
            directions: grid.clone(),
            radii,
        })
    };
    let surfaces = if model.is_conditional(feature_dim) {
        samples
            .iter()
            .map(|s| surface_for(&s.features))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![surface_for(&[])?]
    };
    let alphas: Vec<f64> = levels.iter().map(|tau| 1.0 - tau).collect();
    let sharpness = sharpness_curve(&surfaces, &alphas)?;

    Ok(ModelReport {
        model: name.to_string(),
        reliability,
        sharpness,
        per_sample_crps,
        avg_crps,
        skill_vs_baseline: None,
    })
}

/// Evaluate every trained model on the test split; skill is taken against
/// the unconditional Gaussian baseline.
pub fn evaluate(
    config: &ExperimentConfig,
    models: &TrainedModels,
    test: &Dataset,
) -> Result<EvaluationReport> {
    let samples = directional_test_samples(&models.point, test)
        .map_err(|e| e.at_stage("test decomposition"))?;
    let mut reports = vec![
        evaluate_model(QSNN_MODEL, &EvalModel::Qsnn(&models.qsnn), config, &samples)
            .map_err(|e| e.at_stage("qsnn evaluation"))?,
        evaluate_model(
            BASELINE_MODEL,
            &EvalModel::Gaussian(&models.gaussian),
            config,
            &samples,
        )
        .map_err(|e| e.at_stage("baseline evaluation"))?,
    ];
    if let Some(net) = &models.covnet {
        reports.push(
            evaluate_model(CONDITIONAL_MODEL, &EvalModel::CovNet(net), config, &samples)
                .map_err(|e| e.at_stage("conditional baseline evaluation"))?,
        );
    }
    let base_score = reports
        .iter()
        .find(|r| r.model == BASELINE_MODEL)
        .map(|r| r.avg_crps)
        .expect("baseline always evaluated");
    for r in reports.iter_mut() {
        if r.model != BASELINE_MODEL {
            r.skill_vs_baseline = Some(skill(r.avg_crps, base_score)?);
        }
    }
    Ok(EvaluationReport {
        config: config.clone(),
        seed: config.seed,
        models: reports,
    })
}

/// Full pipeline in memory: generate, fit, evaluate.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(TrainedModels, EvaluationReport)> {
    config.validate()?;
    let (train, test) = generate_datasets(config).map_err(|e| e.at_stage("data generation"))?;
    let models = fit_models(config, &train)?;
    let report = evaluate(config, &models, &test)?;
    Ok((models, report))
}
