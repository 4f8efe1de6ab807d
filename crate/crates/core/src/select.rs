//! Information-gain feature ranking.
//!
//! Numeric features are discretized with supervised entropy-minimizing
//! binary splits accepted under the MDL stopping rule (Fayyad & Irani),
//! then scored by `H(class) - H(class | bin)` in bits.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::FeatureMatrix;
use crate::ingest::Label;

fn class_index(l: Label) -> usize {
    match l {
        Label::Control => 0,
        Label::Near => 1,
    }
}

/// Shannon entropy (bits) of a class-count vector.
pub fn entropy_bits(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn distinct_classes(counts: &[usize]) -> usize {
    counts.iter().filter(|&&c| c > 0).count()
}

/// Whether splitting a set with class counts `total` into `left` and
/// `total - left` passes the MDL acceptance test.
pub fn mdl_accepts(total: &[usize], left: &[usize]) -> bool {
    let right: Vec<usize> = total.iter().zip(left).map(|(t, l)| t - l).collect();
    let n: usize = total.iter().sum();
    let nl: usize = left.iter().sum();
    let nr = n - nl;
    if n < 2 || nl == 0 || nr == 0 {
        return false;
    }
    let (ent, el, er) = (entropy_bits(total), entropy_bits(left), entropy_bits(&right));
    let nf = n as f64;
    let gain = ent - (nl as f64 * el + nr as f64 * er) / nf;
    let (k, k1, k2) =
        (distinct_classes(total) as f64, distinct_classes(left) as f64, distinct_classes(&right) as f64);
    let delta = (3f64.powf(k) - 2.0).log2() - (k * ent - k1 * el - k2 * er);
    gain > ((nf - 1.0).log2() + delta) / nf
}

/// Supervised MDL discretization. Returns sorted cut points; a feature with
/// no accepted split returns none (a single bin).
pub fn discretize(values: &[f64], labels: &[Label]) -> Vec<f64> {
    assert_eq!(values.len(), labels.len(), "values and labels must align");
    let mut pairs: Vec<(f64, usize)> =
        values.iter().zip(labels).map(|(&v, &l)| (v, class_index(l))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut cuts = Vec::new();
    split_range(&pairs, &mut cuts);
    cuts.sort_by(f64::total_cmp);
    cuts
}

fn split_range(pairs: &[(f64, usize)], cuts: &mut Vec<f64>) {
    let n = pairs.len();
    if n < 2 {
        return;
    }
    let mut total = [0usize; 2];
    for &(_, c) in pairs {
        total[c] += 1;
    }
    if distinct_classes(&total) < 2 {
        return;
    }

    // best boundary by weighted child entropy; lowest index wins ties
    let mut left = [0usize; 2];
    let mut best: Option<(usize, f64, [usize; 2])> = None;
    for i in 1..n {
        left[pairs[i - 1].1] += 1;
        if pairs[i].0 == pairs[i - 1].0 {
            continue;
        }
        let right = [total[0] - left[0], total[1] - left[1]];
        let e = (i as f64 * entropy_bits(&left) + (n - i) as f64 * entropy_bits(&right)) / n as f64;
        if best.is_none_or(|(_, be, _)| e < be) {
            best = Some((i, e, left));
        }
    }
    let Some((i, _, left)) = best else { return };
    if !mdl_accepts(&total, &left) {
        return;
    }
    cuts.push(0.5 * (pairs[i - 1].0 + pairs[i].0));
    split_range(&pairs[..i], cuts);
    split_range(&pairs[i..], cuts);
}

/// Bin index of `v` given sorted cut points.
pub fn bin_of(v: f64, cuts: &[f64]) -> usize {
    cuts.partition_point(|&c| c < v)
}

/// `H(class) - H(class | bin)` in bits, clamped to `[0, H(class)]`.
pub fn info_gain(bins: &[usize], labels: &[Label]) -> f64 {
    assert_eq!(bins.len(), labels.len(), "bins and labels must align");
    let mut total = [0usize; 2];
    let n_bins = bins.iter().max().map_or(0, |m| m + 1);
    let mut per_bin = vec![[0usize; 2]; n_bins];
    for (&b, &l) in bins.iter().zip(labels) {
        total[class_index(l)] += 1;
        per_bin[b][class_index(l)] += 1;
    }
    let n = bins.len() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let h = entropy_bits(&total);
    let cond: f64 =
        per_bin.iter().map(|c| (c[0] + c[1]) as f64 / n * entropy_bits(c)).sum();
    (h - cond).clamp(0.0, h)
}

/// Discretize then score one feature column.
pub fn feature_gain(values: &[f64], labels: &[Label]) -> f64 {
    let cuts = discretize(values, labels);
    let bins: Vec<usize> = values.iter().map(|&v| bin_of(v, &cuts)).collect();
    info_gain(&bins, labels)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum KeepRule {
    /// Keep features with strictly positive gain.
    #[default]
    Positive,
    All,
    TopK(usize),
}

impl fmt::Display for KeepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeepRule::Positive => f.write_str("positive"),
            KeepRule::All => f.write_str("all"),
            KeepRule::TopK(k) => write!(f, "top:{k}"),
        }
    }
}

impl FromStr for KeepRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "positive" => Ok(KeepRule::Positive),
            "all" => Ok(KeepRule::All),
            other => match other.strip_prefix("top:").map(str::parse::<usize>) {
                Some(Ok(k)) if k > 0 => Ok(KeepRule::TopK(k)),
                _ => Err(format!("invalid keep rule {other:?} (positive, all or top:<k> with k >= 1)")),
            },
        }
    }
}

impl From<KeepRule> for String {
    fn from(k: KeepRule) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for KeepRule {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature: String,
    pub info_gain_bits: f64,
    pub selected: bool,
}

/// Features ordered by gain (descending), ties by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub entries: Vec<RankedFeature>,
    pub keep_rule: KeepRule,
}

impl FeatureRanking {
    /// Selected feature names in matrix column order.
    pub fn selected_in_order(&self, columns: &[String]) -> Vec<String> {
        columns
            .iter()
            .filter(|c| self.entries.iter().any(|e| e.selected && &e.feature == *c))
            .cloned()
            .collect()
    }

    /// Writes `rank,feature,info_gain_bits,selected`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "rank,feature,info_gain_bits,selected").map_err(io)?;
        for (i, e) in self.entries.iter().enumerate() {
            writeln!(w, "{},{},{:.16e},{}", i + 1, e.feature, e.info_gain_bits, e.selected)
                .map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// Ranks every column of a (training) matrix and applies the keep rule.
pub fn rank_and_select(
    matrix: &FeatureMatrix,
    labels: &[Label],
    keep: KeepRule,
    exec: Exec,
) -> Result<FeatureRanking> {
    if matrix.n_rows() != labels.len() {
        return Err(Error::Data("matrix rows and labels differ in length".into()));
    }
    if matrix.n_rows() < 2 {
        return Err(Error::Data("ranking needs at least two instances".into()));
    }
    let cols: Vec<usize> = (0..matrix.n_cols()).collect();
    let gains = exec.map(&cols, |&j| feature_gain(&matrix.column(j), labels));
    let mut entries: Vec<RankedFeature> = matrix
        .columns
        .iter()
        .zip(gains)
        .map(|(f, g)| RankedFeature { feature: f.clone(), info_gain_bits: g, selected: false })
        .collect();
    entries.sort_by(|a, b| {
        b.info_gain_bits.total_cmp(&a.info_gain_bits).then_with(|| a.feature.cmp(&b.feature))
    });

    let all_zero = entries.iter().all(|e| e.info_gain_bits <= 0.0);
    for (i, e) in entries.iter_mut().enumerate() {
        e.selected = match keep {
            KeepRule::All => true,
            KeepRule::Positive => all_zero || e.info_gain_bits > 0.0,
            KeepRule::TopK(k) => i < k,
        };
    }
    if all_zero && keep == KeepRule::Positive {
        log::warn!("every feature has zero information gain; keeping the full set");
    }
    Ok(FeatureRanking { entries, keep_rule: keep })
}
