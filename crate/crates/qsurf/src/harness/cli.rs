//! Command-line interface for the experiment harness.

use super::artifacts::{self, write_all};
use super::config::ExperimentConfig;
use super::report::{dataset_csv, parse_dataset_csv, EvaluationReport};
use super::runner::{evaluate, fit_models, generate_datasets, Dataset, TrainedModels};
use crate::error::{Error, Result};
use crate::nets::persist::{self, SavedModel};
use crate::numkit::Rng;
use crate::synthdata::{gen_cmgd, gen_mgd, gen_smd, SyntheticKind};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

/// Output directory environment override.
pub const OUT_DIR_ENV: &str = "QSURF_OUT";

#[derive(Parser)]
#[command(name = "qsurf", about = "Quantile-surface forecasting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Synthetic preset: mgd, smd or cmgd.
    #[arg(long)]
    preset: Option<SyntheticKind>,
    /// Config file (flat key = value); flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reduced epoch budget (5000) for quick runs.
    #[arg(long)]
    fast: bool,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    /// Comma-separated quantile levels, e.g. 0.1,0.5,0.9.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
    /// Comma-separated hidden layer widths.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    #[arg(long)]
    directions: Option<usize>,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    /// Also fit the conditional Gaussian covariance network baseline.
    #[arg(long)]
    conditional_baseline: Option<bool>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match (&self.config, self.preset) {
            (Some(path), _) => ExperimentConfig::from_text(&std::fs::read_to_string(path)?)?,
            (None, Some(preset)) => ExperimentConfig::preset(preset, self.seed),
            (None, None) => {
                return Err(Error::Config("either --preset or --config is required".into()))
            }
        };
        if let Some(preset) = self.preset {
            config.preset = preset;
        }
        config.seed = self.seed;
        if self.fast {
            config = config.fast();
        }
        if let Some(v) = self.epochs {
            config.epochs = v;
        }
        if let Some(v) = self.learning_rate {
            config.learning_rate = v;
        }
        if let Some(v) = self.l2 {
            config.l2 = v;
        }
        if let Some(v) = &self.levels {
            config.levels = v.clone();
        }
        if let Some(v) = &self.hidden {
            config.hidden = v.clone();
        }
        if let Some(v) = self.directions {
            config.directions = v;
        }
        if let Some(v) = self.n_train {
            config.n_train = v;
        }
        if let Some(v) = self.n_test {
            config.n_test = v;
        }
        if let Some(v) = self.conditional_baseline {
            config.conditional_baseline = v;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit a dataset CSV from a synthetic preset.
    Gen {
        #[arg(long)]
        preset: SyntheticKind,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate data, fit all models and persist them.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score persisted models on a dataset CSV.
    Eval {
        /// Directory holding config.txt and the persisted model files.
        #[arg(long)]
        models: PathBuf,
        /// Dataset CSV to evaluate on.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: generate, train, evaluate, write all artifacts.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-emit the CSV tables from a persisted report.
    Report {
        /// Path to a report.json produced by run or eval.
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn out_dir(flag: PathBuf) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or(flag)
}

fn load_models(dir: &Path) -> Result<(ExperimentConfig, TrainedModels)> {
    let config = ExperimentConfig::from_text(&std::fs::read_to_string(
        dir.join(artifacts::CONFIG_FILE),
    )?)?;
    let point = match persist::load(&dir.join(artifacts::POINT_MODEL_FILE))? {
        SavedModel::Point(m) => m,
        _ => return Err(Error::Config("point.model.json holds a different model".into())),
    };
    let qsnn = match persist::load(&dir.join(artifacts::QSNN_MODEL_FILE))? {
        SavedModel::Qsnn(m) => m,
        _ => return Err(Error::Config("qsnn.model.json holds a different model".into())),
    };
    let gaussian = match persist::load(&dir.join(artifacts::GAUSSIAN_MODEL_FILE))? {
        SavedModel::Gaussian(m) => m,
        _ => {
            return Err(Error::Config(
                "gaussian_unconditional.model.json holds a different model".into(),
            ))
        }
    };
    let covnet_path = dir.join(artifacts::COVNET_MODEL_FILE);
    let covnet = if covnet_path.exists() {
        match persist::load(&covnet_path)? {
            SavedModel::CovarianceNet(m) => Some(m),
            _ => {
                return Err(Error::Config(
                    "gaussian_conditional.model.json holds a different model".into(),
                ))
            }
        }
    } else {
        None
    };
    Ok((
        config,
        TrainedModels {
            point,
            qsnn,
            qsnn_curve: Vec::new(),
            gaussian,
            covnet,
        },
    ))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Gen { preset, n, seed, out } => {
            let mut rng = Rng::derive(seed, "train");
            let (features, observations) = match preset {
                SyntheticKind::Mgd => (Vec::new(), gen_mgd(&mut rng, n)),
                SyntheticKind::Smd => (Vec::new(), gen_smd(&mut rng, n)),
                SyntheticKind::Cmgd => gen_cmgd(&mut rng, n)?,
            };
            let csv = dataset_csv(&features, &observations);
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Train { config, out } => {
            let config = config.resolve()?;
            let out = out_dir(out);
            let (train, test) = generate_datasets(&config)?;
            let models = fit_models(&config, &train)?;
            std::fs::create_dir_all(&out)?;
            std::fs::write(out.join(artifacts::CONFIG_FILE), config.to_text())?;
            let mut files = vec![artifacts::CONFIG_FILE.to_string()];
            files.extend(artifacts::write_datasets(&out, &train, &test)?);
            files.extend(artifacts::write_models(&out, &models)?);
            artifacts::write_manifest(&out, &config, files)?;
            eprintln!("trained models written to {}", out.display());
            Ok(())
        }
        Command::Eval { models, data, out } => {
            let (config, trained) = load_models(&models)?;
            let (features, observations) = parse_dataset_csv(&std::fs::read_to_string(data)?)?;
            let test = Dataset {
                features,
                observations,
            };
            let report = evaluate(&config, &trained, &test)?;
            let out = out_dir(out);
            std::fs::create_dir_all(&out)?;
            report.save(&out.join(artifacts::REPORT_FILE))?;
            report.write_tables(&out)?;
            eprintln!("evaluation written to {}", out.display());
            Ok(())
        }
        Command::Run { config, out } => {
            let config = config.resolve()?;
            let out = out_dir(out);
            let started = std::time::Instant::now();
            let (train, test) = generate_datasets(&config)?;
            let models = fit_models(&config, &train)?;
            let report = evaluate(&config, &models, &test)?;
            write_all(&out, &config, &train, &test, &models, &report)?;
            // runtime goes to the console, not into the artifacts, so a
            // repeated run stays byte-identical
            eprintln!(
                "run complete in {:.1}s; report in {}",
                started.elapsed().as_secs_f64(),
                out.display()
            );
            for m in &report.models {
                match m.skill_vs_baseline {
                    Some(s) => eprintln!(
                        "  {}: avg directional CRPS {:.4}, skill {:.1}%",
                        m.model,
                        m.avg_crps,
                        100.0 * s
                    ),
                    None => eprintln!("  {}: avg directional CRPS {:.4}", m.model, m.avg_crps),
                }
            }
            Ok(())
        }
        Command::Report { from, out } => {
            let report = EvaluationReport::load(&from)?;
            let out = out_dir(out);
            std::fs::create_dir_all(&out)?;
            report.write_tables(&out)?;
            eprintln!("tables written to {}", out.display());
            Ok(())
        }
    }
}

/// Entry point for the `qsurf` binary.
pub fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            std::process::ExitCode::FAILURE
        }
    }
}
