//! File-level steps behind the command-line subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::eval::{self, Ablation, EvalReport, Evaluation};
use crate::exec::Exec;
use crate::features::{extract_instances, FeatureMatrix};
use crate::ingest::{self, SensorLog};
use crate::learn::{train_with_selection, TrainedModel};
use crate::select::FeatureRanking;
use crate::synth::{gen_dataset, Dataset};

pub const RAW_LOG_FILE: &str = "raw_log.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const FEATURES_FILE: &str = "features.csv";
pub const RANKING_FILE: &str = "ranking.csv";
pub const MODEL_FILE: &str = "model.json";
pub const REPORT_FILE: &str = "report.csv";
pub const ROC_CSV_FILE: &str = "roc.csv";
pub const ROC_SVG_FILE: &str = "roc.svg";
pub const ABLATION_FILE: &str = "ablation.csv";
pub const SUBSET_REPORT_FILE: &str = "subset_report.csv";
pub const SUBSET_MODEL_FILE: &str = "subset_model.json";

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn generate(cfg: &RunConfig, exec: Exec) -> Result<Dataset> {
    let profiles = cfg.generate.resolved_profiles()?;
    gen_dataset(
        &profiles,
        cfg.generate.n_control_windows,
        cfg.generate.n_near_windows,
        cfg.window,
        cfg.seed,
        exec,
    )
}

pub fn write_dataset(ds: &Dataset, log_path: &Path, labels_path: &Path) -> Result<()> {
    ingest::write_log(log_path, &ds.series)?;
    ingest::write_labels(labels_path, &ds.labels)
}

pub fn dataset_to_log(ds: Dataset) -> (SensorLog, BTreeMap<usize, ingest::Label>) {
    let log = ds.series.into_iter().map(|s| (s.sensor_id.clone(), s)).collect();
    (log, ds.labels.into_iter().collect())
}

pub fn extract_log(
    log: &SensorLog,
    labels: Option<&BTreeMap<usize, ingest::Label>>,
    cfg: &RunConfig,
    exec: Exec,
) -> Result<FeatureMatrix> {
    let instances = ingest::log_to_instances(log, cfg.window, labels)?;
    info!("extracting {} instances from {} sensors", instances.len(), log.len());
    extract_instances(&instances, &cfg.features, exec)
}

/// Reads a raw log and, if present, its label sidecar. A missing sidecar
/// yields an unlabeled matrix.
pub fn extract_files(log_path: &Path, labels_path: Option<&Path>, cfg: &RunConfig, exec: Exec) -> Result<FeatureMatrix> {
    let log = ingest::parse_log(log_path)?;
    let labels = match labels_path {
        Some(p) if p.exists() => Some(ingest::parse_labels(p)?),
        Some(p) => {
            warn!("label sidecar {} not found; writing an unlabeled matrix", p.display());
            None
        }
        None => {
            warn!("no label sidecar given; writing an unlabeled matrix");
            None
        }
    };
    extract_log(&log, labels.as_ref(), cfg, exec)
}

/// Feature selection plus training on every row of the matrix.
pub fn train(matrix: &FeatureMatrix, cfg: &RunConfig, exec: Exec) -> Result<(TrainedModel, FeatureRanking)> {
    train_with_selection(matrix, &cfg.train, cfg.selection.keep, exec)
}

pub fn write_report(report: &EvalReport, out_dir: &Path, roc_svg: bool) -> Result<()> {
    report.write_csv(out_dir.join(REPORT_FILE))?;
    report.write_roc_csv(out_dir.join(ROC_CSV_FILE))?;
    if roc_svg {
        report.write_roc_svg(out_dir.join(ROC_SVG_FILE))?;
    }
    Ok(())
}

pub fn write_evaluation(ev: &Evaluation, out_dir: &Path, roc_svg: bool) -> Result<()> {
    ev.model.save(out_dir.join(MODEL_FILE))?;
    ev.ranking.write_csv(out_dir.join(RANKING_FILE))?;
    write_report(&ev.report, out_dir, roc_svg)
}

pub fn ablate(matrix: &FeatureMatrix, cfg: &RunConfig, exec: Exec) -> Result<Ablation> {
    eval::ablation(matrix, &cfg.eval_settings(), cfg.ablation.subset.as_deref(), exec)
}

pub fn write_ablation(ab: &Ablation, out_dir: &Path) -> Result<()> {
    ab.write_csv(out_dir.join(ABLATION_FILE))?;
    if let Some((_, ev)) = &ab.subset {
        ev.report.write_csv(out_dir.join(SUBSET_REPORT_FILE))?;
        ev.model.save(out_dir.join(SUBSET_MODEL_FILE))?;
    }
    Ok(())
}

pub struct PipelineOutputs {
    pub out_dir: PathBuf,
    pub evaluation: Evaluation,
}

/// generate -> extract -> select/train -> evaluate, writing every
/// intermediate file into `out_dir`. The raw log is optional because it is
/// by far the largest artifact.
pub fn run(cfg: &RunConfig, out_dir: &Path, write_raw: bool, exec: Exec) -> Result<PipelineOutputs> {
    ensure_dir(out_dir)?;
    let ds = generate(cfg, exec)?;
    ingest::write_labels(out_dir.join(LABELS_FILE), &ds.labels)?;
    if write_raw {
        ingest::write_log(out_dir.join(RAW_LOG_FILE), &ds.series)?;
    }
    let (log, labels) = dataset_to_log(ds);
    let matrix = extract_log(&log, Some(&labels), cfg, exec)?;
    drop(log);
    matrix.write_csv(out_dir.join(FEATURES_FILE))?;
    let evaluation = eval::evaluate(&matrix, &cfg.eval_settings(), exec)?;
    write_evaluation(&evaluation, out_dir, true)?;
    info!(
        "accuracy {:.4}, AUC {:.4}",
        evaluation.report.metrics.accuracy, evaluation.report.roc.auc
    );
    Ok(PipelineOutputs { out_dir: out_dir.to_path_buf(), evaluation })
}
