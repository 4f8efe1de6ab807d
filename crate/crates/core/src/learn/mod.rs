//! Classifiers: linear SVM trained by SMO, Gaussian naive Bayes and a
//! one-hidden-layer perceptron, behind a common [`TrainedModel`].
//!
//! Defaults follow the usual desktop-toolkit settings: C = 1, tolerance
//! 1e-3, linear kernel, inputs min-max scaled to [0, 1]; MLP learning rate
//! 0.3, momentum 0.2, 500 epochs and `(features + classes) / 2` hidden units.

pub mod mlp;
pub mod nb;
pub mod smo;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::FeatureMatrix;
use crate::ingest::Label;
use crate::select::{rank_and_select, FeatureRanking, KeepRule};

pub use mlp::{Mlp, MlpSchedule};
pub use nb::NaiveBayes;
pub use smo::{kkt_violations, SmoSolution};

pub const MODEL_FORMAT: &str = "nearness-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Smo,
    Nb,
    Mlp,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Smo => "smo",
            Algorithm::Nb => "nb",
            Algorithm::Mlp => "mlp",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "smo" => Ok(Algorithm::Smo),
            "nb" => Ok(Algorithm::Nb),
            "mlp" => Ok(Algorithm::Mlp),
            o => Err(format!("unknown algorithm {o:?} (smo, nb or mlp)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    #[default]
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoConfig {
    pub c: f64,
    pub tolerance: f64,
    pub kernel: Kernel,
    pub max_iter: usize,
}

impl Default for SmoConfig {
    fn default() -> Self {
        Self { c: 1.0, tolerance: 1e-3, kernel: Kernel::Linear, max_iter: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlpConfig {
    /// `None` resolves to `(n_features + n_classes) / 2`.
    pub hidden_units: Option<usize>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self { hidden_units: None, learning_rate: 0.3, momentum: 0.2, epochs: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub smo: SmoConfig,
    pub mlp: MlpConfig,
    pub normalize_inputs: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Smo,
            seed: 1,
            smo: SmoConfig::default(),
            mlp: MlpConfig::default(),
            normalize_inputs: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.smo.c > 0.0 && self.smo.c.is_finite()) {
            return Err(Error::Config("SMO C must be > 0".into()));
        }
        if self.smo.tolerance.is_nan() || self.smo.tolerance <= 0.0 {
            return Err(Error::Config("SMO tolerance must be > 0".into()));
        }
        if self.mlp.epochs == 0 {
            return Err(Error::Config("MLP epochs must be >= 1".into()));
        }
        if self.mlp.hidden_units == Some(0) {
            return Err(Error::Config("MLP hidden_units must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-feature min-max scaling fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Normalizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for r in rows {
            for j in 0..d {
                min[j] = min[j].min(r[j]);
                max[j] = max[j].max(r[j]);
            }
        }
        Self { min, max }
    }

    /// Maps training ranges onto [0, 1]; constant features map to 0.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    /// `alpha_i * y_i` of each support vector.
    pub coef: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Indices of the support vectors in the training rows.
    pub support_indices: Vec<usize>,
    /// Support vectors in model input space (after normalization).
    pub support_vectors: Vec<Vec<f64>>,
    pub bias: f64,
    pub objective: f64,
    pub iterations: usize,
}

impl SmoParams {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.coef
            .iter()
            .zip(&self.support_vectors)
            .map(|(c, sv)| c * smo::dot(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams {
    Smo(SmoParams),
    Nb(NaiveBayes),
    Mlp(Mlp),
}

/// How the training rows were drawn, so a model can be evaluated on its own
/// held-out rows later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub seed: u64,
    pub stratified: bool,
    pub n_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format: String,
    pub version: u32,
    pub algorithm: Algorithm,
    pub config: TrainConfig,
    /// Feature schema (column names) the model consumes, in order.
    pub features: Vec<String>,
    pub normalizer: Option<Normalizer>,
    pub params: ModelParams,
    #[serde(default)]
    pub split: Option<SplitRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Larger means more "near": SVM margin, P(near) for NB, near-unit
    /// activation for the MLP.
    pub score: f64,
}

fn check_training_set(rows: &[Vec<f64>], labels: &[Label]) -> Result<()> {
    if rows.len() != labels.len() {
        return Err(Error::Training("rows and labels differ in length".into()));
    }
    if !labels.contains(&Label::Control) || !labels.contains(&Label::Near) {
        return Err(Error::Training("training set must contain both classes".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Training("training features must be finite".into()));
    }
    Ok(())
}

fn prepare(rows: &[Vec<f64>], config: &TrainConfig) -> (Option<Normalizer>, Vec<Vec<f64>>) {
    if config.normalize_inputs {
        let norm = Normalizer::fit(rows);
        let scaled = rows.iter().map(|r| norm.apply(r)).collect();
        (Some(norm), scaled)
    } else {
        (None, rows.to_vec())
    }
}

fn assemble(
    config: &TrainConfig,
    features: &[String],
    normalizer: Option<Normalizer>,
    params: ModelParams,
) -> TrainedModel {
    TrainedModel {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        algorithm: config.algorithm,
        config: config.clone(),
        features: features.to_vec(),
        normalizer,
        params,
        split: None,
    }
}

/// Linear SVM via SMO.
pub fn train_smo(matrix: &FeatureMatrix, labels: &[Label], config: &TrainConfig) -> Result<TrainedModel> {
    config.validate()?;
    check_training_set(&matrix.rows, labels)?;
    let (normalizer, x) = prepare(&matrix.rows, config);
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let kernel = smo::linear_kernel(&x);
    let sol = smo::solve(&kernel, &y, config.smo.c, config.smo.tolerance, config.smo.max_iter);
    let support_indices: Vec<usize> = (0..x.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    let params = SmoParams {
        coef: support_indices.iter().map(|&i| sol.alpha[i] * y[i]).collect(),
        alpha: support_indices.iter().map(|&i| sol.alpha[i]).collect(),
        support_vectors: support_indices.iter().map(|&i| x[i].clone()).collect(),
        support_indices,
        bias: sol.bias,
        objective: sol.objective,
        iterations: sol.iterations,
    };
    Ok(assemble(config, &matrix.columns, normalizer, ModelParams::Smo(params)))
}

pub fn train_nb(matrix: &FeatureMatrix, labels: &[Label], config: &TrainConfig) -> Result<TrainedModel> {
    config.validate()?;
    check_training_set(&matrix.rows, labels)?;
    let (normalizer, x) = prepare(&matrix.rows, config);
    let nb = NaiveBayes::fit(&x, labels)?;
    Ok(assemble(config, &matrix.columns, normalizer, ModelParams::Nb(nb)))
}

pub fn train_mlp(matrix: &FeatureMatrix, labels: &[Label], config: &TrainConfig) -> Result<TrainedModel> {
    config.validate()?;
    check_training_set(&matrix.rows, labels)?;
    let (normalizer, x) = prepare(&matrix.rows, config);
    let n_inputs = matrix.n_cols();
    let hidden = config.mlp.hidden_units.unwrap_or((n_inputs + 2) / 2).max(1);
    let mut rng = mlp::rng_from_seed(config.seed);
    let mut net = Mlp::init(n_inputs, hidden, 2, &mut rng);
    let targets: Vec<Vec<f64>> = labels
        .iter()
        .map(|l| match l {
            Label::Control => vec![1.0, 0.0],
            Label::Near => vec![0.0, 1.0],
        })
        .collect();
    let sched = MlpSchedule {
        learning_rate: config.mlp.learning_rate,
        momentum: config.mlp.momentum,
        epochs: config.mlp.epochs,
    };
    net.train(&x, &targets, sched, &mut rng)?;
    Ok(assemble(config, &matrix.columns, normalizer, ModelParams::Mlp(net)))
}

pub fn train(matrix: &FeatureMatrix, labels: &[Label], config: &TrainConfig) -> Result<TrainedModel> {
    match config.algorithm {
        Algorithm::Smo => train_smo(matrix, labels, config),
        Algorithm::Nb => train_nb(matrix, labels, config),
        Algorithm::Mlp => train_mlp(matrix, labels, config),
    }
}

/// Ranks features on the training rows, keeps the selected subset and
/// trains on it. Nothing outside `matrix` is consulted.
pub fn train_with_selection(
    matrix: &FeatureMatrix,
    config: &TrainConfig,
    keep: KeepRule,
    exec: Exec,
) -> Result<(TrainedModel, FeatureRanking)> {
    let labels = matrix.require_labels()?;
    let ranking = rank_and_select(matrix, &labels, keep, exec)?;
    let selected = ranking.selected_in_order(&matrix.columns);
    let reduced = matrix.select_columns(&selected)?;
    let model = train(&reduced, &labels, config)?;
    Ok((model, ranking))
}

impl TrainedModel {
    fn input(&self, row: &[f64]) -> Vec<f64> {
        match &self.normalizer {
            Some(n) => n.apply(row),
            None => row.to_vec(),
        }
    }

    /// SVM decision value for a row already in schema order.
    pub fn decision_value(&self, row: &[f64]) -> Result<f64> {
        match &self.params {
            ModelParams::Smo(p) => Ok(p.decision(&self.input(row))),
            _ => Err(Error::Schema(format!("decision values need an SMO model, not {}", self.algorithm))),
        }
    }

    /// Predicts a row given in the model's feature order. Ties go to control.
    pub fn predict_row(&self, row: &[f64]) -> Prediction {
        let x = self.input(row);
        let (near, score) = match &self.params {
            ModelParams::Smo(p) => {
                let s = p.decision(&x);
                (s > 0.0, s)
            }
            ModelParams::Nb(nb) => {
                let p = nb.posterior_near(&x);
                (p > 0.5, p)
            }
            ModelParams::Mlp(net) => {
                let out = net.forward(&x).output;
                (out[1] > out[0], out[1])
            }
        };
        Prediction { label: if near { Label::Near } else { Label::Control }, score }
    }

    /// Predicts one instance given as named features; the name set must
    /// equal the model schema exactly (order may differ).
    pub fn predict_named(&self, names: &[String], values: &[f64]) -> Result<Prediction> {
        let missing: Vec<&String> = self.features.iter().filter(|f| !names.contains(f)).collect();
        let extra: Vec<&String> = names.iter().filter(|n| !self.features.contains(n)).collect();
        if !missing.is_empty() || !extra.is_empty() || names.len() != values.len() {
            return Err(Error::Schema(format!("missing features {missing:?}, extra features {extra:?}")));
        }
        let row: Vec<f64> = self
            .features
            .iter()
            .map(|f| values[names.iter().position(|n| n == f).expect("checked")])
            .collect();
        Ok(self.predict_row(&row))
    }

    /// Projects the matrix onto the model schema and predicts every row.
    pub fn predict_matrix(&self, matrix: &FeatureMatrix) -> Result<Vec<Prediction>> {
        let missing: Vec<&String> =
            self.features.iter().filter(|f| !matrix.columns.contains(f)).collect();
        if !missing.is_empty() {
            return Err(Error::Schema(format!("matrix lacks model features {missing:?}")));
        }
        let projected = matrix.select_columns(&self.features)?;
        Ok(projected.rows.iter().map(|r| self.predict_row(r)).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: TrainedModel =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if m.format != MODEL_FORMAT || m.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported model container {} v{}",
                m.format, m.version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Control as C, Near as N};

    fn four_point() -> (FeatureMatrix, Vec<Label>) {
        let m = FeatureMatrix {
            columns: vec!["a@s".into(), "b@s".into()],
            rows: vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![3.0, 0.0], vec![3.0, 1.0]],
            labels: vec![Some(C), Some(C), Some(N), Some(N)],
        };
        let l = m.require_labels().unwrap();
        (m, l)
    }

    #[test]
    fn smo_four_points_and_duplicates() {
        let (m, l) = four_point();
        let cfg = TrainConfig::default();
        let model = train_smo(&m, &l, &cfg).unwrap();
        for (r, lab) in m.rows.iter().zip(&l) {
            assert_eq!(model.predict_row(r).label, *lab);
        }
        let mid = model.decision_value(&[1.5, 0.5]).unwrap();
        assert!(mid.abs() < 1e-2, "{mid}");

        let dup = m.subset_rows(&[0, 1, 2, 3, 0, 1, 2, 3]);
        let dl = dup.require_labels().unwrap();
        let model2 = train_smo(&dup, &dl, &cfg).unwrap();
        for x in [[0.5, 0.2], [1.5, 0.9], [2.9, 0.0], [1.2, 0.5]] {
            let a = model.decision_value(&x).unwrap();
            let b = model2.decision_value(&x).unwrap();
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn smo_score_zero_is_control() {
        let (m, l) = four_point();
        let mut model = train_smo(&m, &l, &TrainConfig::default()).unwrap();
        if let ModelParams::Smo(p) = &mut model.params {
            p.coef.iter_mut().for_each(|c| *c = 0.0);
            p.bias = 0.0;
        }
        let p = model.predict_row(&[1.0, 1.0]);
        assert_eq!((p.label, p.score), (C, 0.0));
    }

    #[test]
    fn single_class_is_training_error() {
        let (m, _) = four_point();
        for algo in [Algorithm::Smo, Algorithm::Nb, Algorithm::Mlp] {
            let cfg = TrainConfig { algorithm: algo, ..Default::default() };
            assert!(matches!(train(&m, &[C; 4], &cfg), Err(Error::Training(_))));
        }
    }

    #[test]
    fn named_prediction_checks_schema() {
        let (m, l) = four_point();
        let model = train_smo(&m, &l, &TrainConfig::default()).unwrap();
        let p = model.predict_named(&["b@s".into(), "a@s".into()], &[0.0, 3.0]).unwrap();
        assert_eq!(p.label, N);
        let err = model.predict_named(&["a@s".into(), "c@s".into()], &[0.0, 3.0]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("b@s") && msg.contains("c@s"), "{msg}");
    }

    #[test]
    fn save_load_predicts_identically() {
        let (m, l) = four_point();
        let dir = tempfile::tempdir().unwrap();
        for algo in [Algorithm::Smo, Algorithm::Nb, Algorithm::Mlp] {
            let cfg = TrainConfig { algorithm: algo, ..Default::default() };
            let model = train(&m, &l, &cfg).unwrap();
            let p = dir.path().join(format!("{algo}.json"));
            model.save(&p).unwrap();
            let back = TrainedModel::load(&p).unwrap();
            assert_eq!(back, model);
            for x in [[0.3, 0.7], [2.2, 0.1], [1.49, 0.5]] {
                assert_eq!(back.predict_row(&x).score.to_bits(), model.predict_row(&x).score.to_bits());
            }
            // same data, config and seed give the same bytes
            assert_eq!(train(&m, &l, &cfg).unwrap().to_json(), model.to_json());
        }
    }

    #[test]
    fn nb_prediction_score_is_posterior() {
        let (m, l) = four_point();
        let cfg = TrainConfig { algorithm: Algorithm::Nb, normalize_inputs: false, ..Default::default() };
        let model = train_nb(&m, &l, &cfg).unwrap();
        let p = model.predict_row(&[2.9, 0.5]);
        assert_eq!(p.label, N);
        assert!(p.score > 0.5 && p.score <= 1.0);
    }

    #[test]
    fn model_version_checked() {
        let (m, l) = four_point();
        let model = train_smo(&m, &l, &TrainConfig::default()).unwrap();
        let text = model.to_json().replace("\"version\": 1", "\"version\": 99");
        assert!(matches!(TrainedModel::from_json(&text), Err(Error::ModelFormat(_))));
    }
}
