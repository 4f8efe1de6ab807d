//! `nearness`: generate synthetic sensor logs, extract window features,
//! train and evaluate nearness classifiers, and run sensor ablations.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use nearness::config::RunConfig;
use nearness::learn::{Algorithm, TrainedModel};
use nearness::pipeline::{self as pl, ensure_dir};
use nearness::select::KeepRule;
use nearness::{eval, features::FeatureMatrix, Error, Exec, Result};

#[derive(Parser)]
#[command(name = "nearness", version, about = "Human nearness recognition from ambient sensor windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic raw log (raw_log.csv) and label sidecar (labels.csv).
    Generate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated sensor ids to generate (default: all).
        #[arg(long, value_delimiter = ',')]
        sensors: Option<Vec<String>>,
        /// Number of control (steady) windows.
        #[arg(long)]
        n_control: Option<usize>,
        /// Number of near (non-steady) windows.
        #[arg(long)]
        n_near: Option<usize>,
    },
    /// Window a raw log and write the feature matrix (features.csv).
    Extract {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        feat: FeatureArgs,
        /// Raw log CSV: sensor_id,timestamp_ms,x,y,z.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Label sidecar CSV: window_index,label. Defaults to labels.csv next to the log.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Select features and train on the 60% split (model.json, ranking.csv).
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Feature matrix CSV.
        #[arg(long)]
        features: Option<PathBuf>,
    },
    /// Score a model on its held-out rows, or train and score from config (report.csv, roc.csv).
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Feature matrix CSV.
        #[arg(long)]
        features: Option<PathBuf>,
        /// Saved model; without it a model is trained from the config.
        #[arg(long = "model")]
        model_path: Option<PathBuf>,
        /// Also draw the ROC curve as roc.svg.
        #[arg(long)]
        roc: bool,
    },
    /// Leave-one-sensor-out ablation (ablation.csv).
    Ablate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Feature matrix CSV.
        #[arg(long)]
        features: Option<PathBuf>,
        /// Comma-separated sensors for an extra subset model.
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<String>>,
    },
    /// generate -> extract -> train -> evaluate in one run.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        feat: FeatureArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Do not write the raw log (the largest output).
        #[arg(long)]
        no_raw_log: bool,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for generation, splitting and training.
    #[arg(long)]
    seed: Option<u64>,
    /// Readings per window (power of two).
    #[arg(long)]
    window: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run single-threaded.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct FeatureArgs {
    /// Signed telescoping sums for GAPI and FFT-ADPI.
    #[arg(long)]
    literal_telescoping: bool,
    /// Add GCS-PDF-X/Y/Z to each sensor's features.
    #[arg(long)]
    include_gcs_pdf: bool,
}

#[derive(Args)]
struct ModelArgs {
    /// Classifier.
    #[arg(long, value_parser = ["smo", "nb", "mlp"])]
    algo: Option<String>,
    /// Feature keep rule: positive, all or top:<k>.
    #[arg(long)]
    keep: Option<String>,
    /// Class-stratified 60/40 split.
    #[arg(long)]
    stratified: bool,
    /// Skip min-max input normalization.
    #[arg(long)]
    no_normalize: bool,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.set_seed(s);
        }
        if let Some(w) = self.window {
            cfg.window = w;
        }
        if let Some(o) = &self.out {
            cfg.paths.out_dir = Some(o.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }
}

impl FeatureArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.features.literal_telescoping |= self.literal_telescoping;
        cfg.features.include_gcs_pdf |= self.include_gcs_pdf;
    }
}

impl ModelArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(a) = &self.algo {
            cfg.train.algorithm = a.parse::<Algorithm>().map_err(Error::Config)?;
        }
        if let Some(k) = &self.keep {
            cfg.selection.keep = k.parse::<KeepRule>().map_err(Error::Config)?;
        }
        cfg.split.stratified |= self.stratified;
        if self.no_normalize {
            cfg.train.normalize_inputs = false;
        }
        cfg.validate()
    }
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.paths.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    ensure_dir(&dir)?;
    Ok(dir)
}

fn require(path: Option<PathBuf>, fallback: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    path.or_else(|| fallback.clone())
        .ok_or_else(|| Error::Config(format!("no {what} given (flag or [paths] in the config)")))
}

fn read_matrix(path: &Path) -> Result<FeatureMatrix> {
    info!("reading {}", path.display());
    FeatureMatrix::read_csv(path)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { common, sensors, n_control, n_near } => {
            let mut cfg = common.load()?;
            if sensors.is_some() {
                cfg.generate.sensors = sensors;
            }
            if let Some(n) = n_control {
                cfg.generate.n_control_windows = n;
            }
            if let Some(n) = n_near {
                cfg.generate.n_near_windows = n;
            }
            let dir = out_dir(&cfg)?;
            let ds = pl::generate(&cfg, common.exec())?;
            pl::write_dataset(&ds, &dir.join(pl::RAW_LOG_FILE), &dir.join(pl::LABELS_FILE))?;
            info!("wrote {} sensors, {} windows to {}", ds.series.len(), ds.labels.len(), dir.display());
        }
        Command::Extract { common, feat, log, labels } => {
            let mut cfg = common.load()?;
            feat.apply(&mut cfg);
            let log = require(log, &cfg.paths.log, "raw log (--log)")?;
            let labels = labels
                .or_else(|| cfg.paths.labels.clone())
                .unwrap_or_else(|| log.with_file_name(pl::LABELS_FILE));
            let dir = out_dir(&cfg)?;
            let m = pl::extract_files(&log, Some(&labels), &cfg, common.exec())?;
            m.write_csv(dir.join(pl::FEATURES_FILE))?;
            info!("wrote {}x{} matrix", m.n_rows(), m.n_cols());
        }
        Command::Train { common, model, features } => {
            let mut cfg = common.load()?;
            model.apply(&mut cfg)?;
            let path = require(features, &cfg.paths.features, "feature matrix (--features)")?;
            let m = read_matrix(&path)?;
            let dir = out_dir(&cfg)?;
            let fitted = eval::fit_split(&m, &cfg.eval_settings(), common.exec())?;
            fitted.model.save(dir.join(pl::MODEL_FILE))?;
            fitted.ranking.write_csv(dir.join(pl::RANKING_FILE))?;
            info!("trained {} on {} rows, {} features", cfg.train.algorithm, fitted.split.train.len(), fitted.model.features.len());
        }
        Command::Evaluate { common, model, features, model_path, roc } => {
            let mut cfg = common.load()?;
            model.apply(&mut cfg)?;
            let path = require(features, &cfg.paths.features, "feature matrix (--features)")?;
            let m = read_matrix(&path)?;
            let dir = out_dir(&cfg)?;
            let report = match model_path.or_else(|| cfg.paths.model.clone()) {
                Some(p) => eval::evaluate_model(&TrainedModel::load(&p)?, &m)?,
                None => {
                    let ev = eval::evaluate(&m, &cfg.eval_settings(), common.exec())?;
                    ev.model.save(dir.join(pl::MODEL_FILE))?;
                    ev.ranking.write_csv(dir.join(pl::RANKING_FILE))?;
                    ev.report
                }
            };
            pl::write_report(&report, &dir, roc)?;
            println!("accuracy {:.4}  auc {:.4}", report.metrics.accuracy, report.roc.auc);
        }
        Command::Ablate { common, model, features, subset } => {
            let mut cfg = common.load()?;
            model.apply(&mut cfg)?;
            if subset.is_some() {
                cfg.ablation.subset = subset;
            }
            let path = require(features, &cfg.paths.features, "feature matrix (--features)")?;
            let m = read_matrix(&path)?;
            let dir = out_dir(&cfg)?;
            let ab = pl::ablate(&m, &cfg, common.exec())?;
            pl::write_ablation(&ab, &dir)?;
            println!("baseline f_measure {:.4}", ab.baseline.metrics.near.f_measure);
            for r in &ab.rows {
                println!("without-{:<16} f_measure {:.4}  diff {:+.4}", r.removed_sensor, r.f_measure, r.baseline_diff);
            }
        }
        Command::Pipeline { common, feat, model, no_raw_log } => {
            let mut cfg = common.load()?;
            feat.apply(&mut cfg);
            model.apply(&mut cfg)?;
            let dir = out_dir(&cfg)?;
            let out = pl::run(&cfg, &dir, !no_raw_log, common.exec())?;
            let r = &out.evaluation.report;
            println!("accuracy {:.4}  auc {:.4}", r.metrics.accuracy, r.roc.auc);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
