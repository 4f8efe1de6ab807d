//! Hold-out evaluation, per-class metrics, ROC/AUC and leave-one-sensor-out
//! ablation.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::FeatureMatrix;
use crate::ingest::Label;
use crate::learn::{train_with_selection, Prediction, SplitRecord, TrainConfig, TrainedModel};
use crate::select::{FeatureRanking, KeepRule};

pub const MIN_SPLIT_INSTANCES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// `ceil(0.6 n)` without floating point.
pub fn train_size(n: usize) -> usize {
    (3 * n).div_ceil(5)
}

/// Seeded 60/40 partition of instance indices. Both halves are returned in
/// ascending index order.
pub fn split_60_40(labels: &[Label], seed: u64, stratified: bool) -> Result<Split> {
    let n = labels.len();
    if n < MIN_SPLIT_INSTANCES {
        return Err(Error::Data(format!("a 60/40 split needs at least {MIN_SPLIT_INSTANCES} instances, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    let groups: Vec<Vec<usize>> = if stratified {
        [Label::Control, Label::Near]
            .iter()
            .map(|&c| (0..n).filter(|&i| labels[i] == c).collect())
            .collect()
    } else {
        vec![(0..n).collect()]
    };
    for mut g in groups {
        g.shuffle(&mut rng);
        let k = train_size(g.len());
        train.extend_from_slice(&g[..k]);
        test.extend_from_slice(&g[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// Positive class is "near".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn from_pairs(truth: &[Label], predicted: &[Label]) -> Self {
        let mut cm = Self::default();
        for (t, p) in truth.iter().zip(predicted) {
            match (t, p) {
                (Label::Near, Label::Near) => cm.tp += 1,
                (Label::Control, Label::Near) => cm.fp += 1,
                (Label::Control, Label::Control) => cm.tn += 1,
                (Label::Near, Label::Control) => cm.fn_ += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Harmonic mean; 0 when both inputs are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ratio(num: usize, den: usize, name: &str, flags: &mut Vec<String>) -> f64 {
    if den == 0 {
        flags.push(name.to_string());
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub near: ClassMetrics,
    pub control: ClassMetrics,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub one_minus_specificity: f64,
    /// Quantities whose denominator was zero (reported as 0).
    pub undefined: Vec<String>,
}

pub fn metrics(cm: &ConfusionMatrix) -> Metrics {
    let mut undefined = Vec::new();
    let u = &mut undefined;
    let p_near = ratio(cm.tp, cm.tp + cm.fp, "precision_near", u);
    let r_near = ratio(cm.tp, cm.tp + cm.fn_, "recall_near", u);
    let p_ctl = ratio(cm.tn, cm.tn + cm.fn_, "precision_control", u);
    let r_ctl = ratio(cm.tn, cm.tn + cm.fp, "recall_control", u);
    let accuracy = ratio(cm.tp + cm.tn, cm.total(), "accuracy", u);
    Metrics {
        near: ClassMetrics { precision: p_near, recall: r_near, f_measure: f_measure(p_near, r_near) },
        control: ClassMetrics { precision: p_ctl, recall: r_ctl, f_measure: f_measure(p_ctl, r_ctl) },
        accuracy,
        sensitivity: r_near,
        specificity: r_ctl,
        one_minus_specificity: 1.0 - r_ctl,
        undefined,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` from (0, 0) to (1, 1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Threshold sweep over distinct scores, highest first. Tied scores form a
/// single operating point.
pub fn roc_curve(scored: &[(f64, Label)]) -> Result<RocCurve> {
    let pos = scored.iter().filter(|(_, l)| *l == Label::Near).count();
    let neg = scored.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Data("ROC needs at least one instance of each class".into()));
    }
    if scored.iter().any(|(s, _)| s.is_nan()) {
        return Err(Error::Data("ROC scores must not be NaN".into()));
    }
    let mut sorted = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let s = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == s {
            match sorted[i].1 {
                Label::Near => tp += 1,
                Label::Control => fp += 1,
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    if points.last() != Some(&(1.0, 1.0)) {
        points.push((1.0, 1.0));
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Ok(RocCurve { points, auc })
}

/// Everything that determines one hold-out run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSettings {
    pub train: TrainConfig,
    pub keep: KeepRule,
    pub split_seed: u64,
    pub stratified: bool,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self { train: TrainConfig::default(), keep: KeepRule::Positive, split_seed: 1, stratified: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub algorithm: String,
    pub keep: String,
    pub split_seed: Option<u64>,
    pub stratified: bool,
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    pub roc: RocCurve,
}

impl EvalReport {
    /// `metric,value` rows in a fixed order.
    pub fn rows(&self) -> Vec<(String, String)> {
        let m = &self.metrics;
        let f = |v: f64| format!("{v}");
        let mut rows = vec![
            ("algorithm".to_string(), self.algorithm.clone()),
            ("keep".into(), self.keep.clone()),
            ("split_seed".into(), self.split_seed.map_or_else(|| "none".into(), |s| s.to_string())),
            ("stratified".into(), self.stratified.to_string()),
            ("n_train".into(), self.n_train.to_string()),
            ("n_test".into(), self.n_test.to_string()),
            ("n_features".into(), self.n_features.to_string()),
            ("tp".into(), self.confusion.tp.to_string()),
            ("fp".into(), self.confusion.fp.to_string()),
            ("tn".into(), self.confusion.tn.to_string()),
            ("fn".into(), self.confusion.fn_.to_string()),
            ("accuracy".into(), f(m.accuracy)),
            ("precision_near".into(), f(m.near.precision)),
            ("recall_near".into(), f(m.near.recall)),
            ("f_measure_near".into(), f(m.near.f_measure)),
            ("precision_control".into(), f(m.control.precision)),
            ("recall_control".into(), f(m.control.recall)),
            ("f_measure_control".into(), f(m.control.f_measure)),
            ("sensitivity".into(), f(m.sensitivity)),
            ("specificity".into(), f(m.specificity)),
            ("one_minus_specificity".into(), f(m.one_minus_specificity)),
            ("auc".into(), f(self.roc.auc)),
        ];
        if !m.undefined.is_empty() {
            rows.push(("undefined".into(), m.undefined.join(";")));
        }
        rows
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::from("metric,value\n");
        for (k, v) in self.rows() {
            let _ = writeln!(out, "{k},{v}");
        }
        write_text(path.as_ref(), &out)
    }

    pub fn write_roc_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::from("one_minus_specificity,sensitivity\n");
        for (x, y) in &self.roc.points {
            let _ = writeln!(out, "{x},{y}");
        }
        write_text(path.as_ref(), &out)
    }

    pub fn write_roc_svg(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &roc_svg(&self.roc, &self.algorithm))
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Line plot of the curve with the chance diagonal.
pub fn roc_svg(roc: &RocCurve, title: &str) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 60.0;
    let span = SIZE - 2.0 * PAD;
    let px = |x: f64| PAD + x * span;
    let py = |y: f64| SIZE - PAD - y * span;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{span}" height="{span}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let t = k as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t:.1}</text>"#,
            px(t),
            SIZE - PAD + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{t:.1}</text>"#,
            PAD - 6.0,
            py(t) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="gray" stroke-dasharray="4 4"/>"#,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    let pts: Vec<String> =
        roc.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
        pts.join(" ")
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">1-Specificity</text>"#,
        SIZE / 2.0,
        SIZE - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">Sensitivity</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">ROC {title} (AUC = {:.4})</text>"#,
        SIZE / 2.0,
        PAD - 20.0,
        roc.auc
    );
    s.push_str("</svg>\n");
    s
}

/// Scores an already-projected test set.
fn score(truth: &[Label], preds: &[Prediction]) -> Result<(ConfusionMatrix, RocCurve)> {
    if !truth.contains(&Label::Near) || !truth.contains(&Label::Control) {
        return Err(Error::Data("test fold contains a single class; cannot evaluate".into()));
    }
    let predicted: Vec<Label> = preds.iter().map(|p| p.label).collect();
    let cm = ConfusionMatrix::from_pairs(truth, &predicted);
    let scored: Vec<(f64, Label)> = preds.iter().map(|p| p.score).zip(truth.iter().copied()).collect();
    Ok((cm, roc_curve(&scored)?))
}

#[derive(Debug)]
pub struct Evaluation {
    pub report: EvalReport,
    pub model: TrainedModel,
    pub ranking: FeatureRanking,
    pub split: Split,
}

/// A model fitted on the training part of a 60/40 split.
#[derive(Debug)]
pub struct Fitted {
    pub model: TrainedModel,
    pub ranking: FeatureRanking,
    pub split: Split,
}

/// Split, then select and train on the training rows only. The split is
/// recorded in the model so it can be scored on its own held-out rows.
pub fn fit_split(matrix: &FeatureMatrix, settings: &EvalSettings, exec: Exec) -> Result<Fitted> {
    let labels = matrix.require_labels()?;
    let split = split_60_40(&labels, settings.split_seed, settings.stratified)?;
    let train = matrix.subset_rows(&split.train);
    let (mut model, ranking) = train_with_selection(&train, &settings.train, settings.keep, exec)?;
    model.split = Some(SplitRecord {
        seed: settings.split_seed,
        stratified: settings.stratified,
        n_rows: matrix.n_rows(),
    });
    Ok(Fitted { model, ranking, split })
}

/// Split, select on the training rows, train, and score the test rows.
pub fn evaluate(matrix: &FeatureMatrix, settings: &EvalSettings, exec: Exec) -> Result<Evaluation> {
    let Fitted { model, ranking, split } = fit_split(matrix, settings, exec)?;
    let mut report = evaluate_model(&model, matrix)?;
    report.keep = settings.keep.to_string();
    Ok(Evaluation { report, model, ranking, split })
}

/// Scores a saved model. When the model records the split it was trained
/// under and the matrix has the same row count, only the held-out rows are
/// scored; otherwise every row is.
pub fn evaluate_model(model: &TrainedModel, matrix: &FeatureMatrix) -> Result<EvalReport> {
    let labels = matrix.require_labels()?;
    let (rows, split_seed, stratified, n_train) = match &model.split {
        Some(rec) if rec.n_rows == matrix.n_rows() => {
            let s = split_60_40(&labels, rec.seed, rec.stratified)?;
            (s.test, Some(rec.seed), rec.stratified, s.train.len())
        }
        _ => ((0..matrix.n_rows()).collect(), None, false, 0),
    };
    let test = matrix.subset_rows(&rows);
    let preds = model.predict_matrix(&test)?;
    let truth: Vec<Label> = rows.iter().map(|&i| labels[i]).collect();
    let (confusion, roc) = score(&truth, &preds)?;
    Ok(EvalReport {
        algorithm: model.algorithm.to_string(),
        keep: "model".into(),
        split_seed,
        stratified,
        n_train,
        n_test: rows.len(),
        n_features: model.features.len(),
        confusion,
        metrics: metrics(&confusion),
        roc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub removed_sensor: String,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub baseline_diff: f64,
}

#[derive(Debug)]
pub struct Ablation {
    pub baseline: EvalReport,
    /// Sorted by sensor name.
    pub rows: Vec<AblationRow>,
    pub subset: Option<(Vec<String>, Evaluation)>,
}

fn check_sensors(matrix: &FeatureMatrix, names: &[String]) -> Result<()> {
    let valid = matrix.sensors();
    let unknown: Vec<&String> = names.iter().filter(|n| !valid.contains(n)).collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown sensor(s) {unknown:?}; valid sensors: {}", valid.join(", "))))
    }
}

/// Baseline on all sensors, then one retrain per dropped sensor with the
/// same split and seed. Near-class precision, recall and F are reported.
pub fn ablation(
    matrix: &FeatureMatrix,
    settings: &EvalSettings,
    subset: Option<&[String]>,
    exec: Exec,
) -> Result<Ablation> {
    if let Some(sub) = subset {
        check_sensors(matrix, sub)?;
    }
    let sensors = matrix.sensors();
    if sensors.len() < 2 {
        return Err(Error::Data("ablation needs features from at least two sensors".into()));
    }
    let baseline = evaluate(matrix, settings, exec)?.report;
    let base_f = baseline.metrics.near.f_measure;
    let rows = exec.try_map(&sensors, |s| {
        let reduced = matrix.without_sensor(s)?;
        let r = evaluate(&reduced, settings, Exec::Sequential)?.report;
        let near = r.metrics.near;
        Ok(AblationRow {
            removed_sensor: s.clone(),
            precision: near.precision,
            recall: near.recall,
            f_measure: near.f_measure,
            baseline_diff: near.f_measure - base_f,
        })
    })?;
    let subset = match subset {
        Some(sub) => {
            let mut names = sub.to_vec();
            names.sort();
            names.dedup();
            let reduced = matrix.restrict_to_sensors(&names)?;
            Some((names, evaluate(&reduced, settings, exec)?))
        }
        None => None,
    };
    Ok(Ablation { baseline, rows, subset })
}

impl Ablation {
    /// `model,precision,recall,f_measure,baseline_diff`; the baseline row
    /// comes first with an `NA` difference.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "model,precision,recall,f_measure,baseline_diff").map_err(io)?;
        let b = &self.baseline.metrics.near;
        writeln!(w, "baseline-all-sensors,{},{},{},NA", b.precision, b.recall, b.f_measure).map_err(io)?;
        for r in &self.rows {
            writeln!(
                w,
                "without-{},{},{},{},{}",
                r.removed_sensor, r.precision, r.recall, r.f_measure, r.baseline_diff
            )
            .map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Control as C, Near as N};

    fn balanced(n: usize) -> Vec<Label> {
        (0..n).map(|i| if i % 2 == 0 { C } else { N }).collect()
    }

    #[test]
    fn split_sizes_and_determinism() {
        let l = balanced(1000);
        let s = split_60_40(&l, 3, false).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (600, 400));
        assert_eq!(s, split_60_40(&l, 3, false).unwrap());
        assert_ne!(s, split_60_40(&l, 4, false).unwrap());
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());

        let st = split_60_40(&l, 3, true).unwrap();
        let near_train = st.train.iter().filter(|&&i| l[i] == N).count();
        let near_test = st.test.iter().filter(|&&i| l[i] == N).count();
        assert_eq!((near_train, st.train.len() - near_train), (300, 300));
        assert_eq!((near_test, st.test.len() - near_test), (200, 200));

        assert_eq!(train_size(7), 5);
        assert!(split_60_40(&l[..4], 0, false).is_err());
    }

    #[test]
    fn metric_identities() {
        let cm = ConfusionMatrix { tp: 50, fp: 0, tn: 50, fn_: 0 };
        let m = metrics(&cm);
        assert_eq!((m.accuracy, m.sensitivity, m.specificity), (1.0, 1.0, 1.0));
        assert!(m.undefined.is_empty());

        let cm = ConfusionMatrix { tp: 0, fp: 0, tn: 7, fn_: 3 };
        let m = metrics(&cm);
        assert_eq!(m.near.precision, 0.0);
        assert_eq!(m.near.f_measure, 0.0);
        assert!(m.undefined.contains(&"precision_near".to_string()));
        assert_eq!(m.accuracy, 0.7);
    }

    #[test]
    fn roc_basics() {
        let perfect = [(0.9, N), (0.8, N), (0.2, C), (0.1, C)];
        assert_eq!(roc_curve(&perfect).unwrap().auc, 1.0);
        let inverted = [(0.1, N), (0.2, N), (0.8, C), (0.9, C)];
        assert_eq!(roc_curve(&inverted).unwrap().auc, 0.0);
        // all tied: a single diagonal step
        let tied = [(0.5, N), (0.5, C), (0.5, N), (0.5, C)];
        let r = roc_curve(&tied).unwrap();
        assert_eq!(r.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(r.auc, 0.5);
        assert!(roc_curve(&[(0.1, N), (0.2, N)]).is_err());
    }

    #[test]
    fn svg_has_axis_labels() {
        let r = roc_curve(&[(0.9, N), (0.1, C)]).unwrap();
        let s = roc_svg(&r, "smo");
        assert!(s.contains(">Sensitivity<") && s.contains(">1-Specificity<"));
    }
}
