//! Window feature extraction.
//!
//! Every sensor window yields 25 features: Mean, SD, Entropy, MAD, GCS-CDF,
//! GAPI-PDF, GAPI-CDF and FFT-ADPI-CDF per axis plus one MRW. Keys are
//! `<symbol>@<sensor_id>`, e.g. `Mean-X@pressure`.

mod erf;
mod fft;
mod gaussian;
mod matrix;
mod stats;

use serde::{Deserialize, Serialize};

pub use erf::erf;
pub use fft::fft_magnitudes;
pub use gaussian::{
    adpi, cdf_transform, detect_peaks, fft_adpi_cdf, gapi, gcs, pdf_transform, Distribution,
    Transformed, SIGMA_GUARD,
};
pub use matrix::{sensor_of, FeatureMatrix};
pub use stats::{entropy, mad, mean, mrw, std_dev, GaussianStats, ENTROPY_VARIANCE_FLOOR};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ingest::{RawInstance, ReadingWindow};
use crate::synth::AXIS_NAMES;

/// Features per sensor in the default set.
pub const FEATURES_PER_SENSOR: usize = 25;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureOptions {
    /// Use the signed, telescoping interval sum for GAPI and FFT-ADPI.
    #[serde(default)]
    pub literal_telescoping: bool,
    /// Add GCS-PDF-X/Y/Z to the per-sensor set.
    #[serde(default)]
    pub include_gcs_pdf: bool,
}

/// Per-sensor symbols in canonical order.
pub fn feature_symbols(opts: &FeatureOptions) -> Vec<String> {
    let mut out = Vec::with_capacity(FEATURES_PER_SENSOR + 3);
    let per_axis = |out: &mut Vec<String>, name: &str| {
        out.extend(AXIS_NAMES.iter().map(|a| format!("{name}-{a}")));
    };
    for name in ["Mean", "SD", "Entropy", "MAD"] {
        per_axis(&mut out, name);
    }
    out.push("MRW".to_string());
    per_axis(&mut out, "GCS-CDF");
    if opts.include_gcs_pdf {
        per_axis(&mut out, "GCS-PDF");
    }
    for name in ["GAPI-PDF", "GAPI-CDF", "FFT-ADPI-CDF"] {
        per_axis(&mut out, name);
    }
    out
}

/// Features of one sensor window, in [`feature_symbols`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub sensor_id: String,
    pub entries: Vec<(String, f64)>,
}

impl FeatureVector {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct AxisFeatures {
    mean: f64,
    sd: f64,
    entropy: f64,
    mad: f64,
    gcs_cdf: f64,
    gcs_pdf: f64,
    gapi_pdf: f64,
    gapi_cdf: f64,
    adpi_cdf: f64,
}

fn axis_features(values: &[f64], opts: &FeatureOptions) -> Result<AxisFeatures> {
    let pdf = pdf_transform(values);
    let cdf = cdf_transform(values);
    let lit = opts.literal_telescoping;
    Ok(AxisFeatures {
        mean: mean(values),
        sd: std_dev(values),
        entropy: entropy(values),
        mad: mad(values),
        gcs_cdf: gcs(&cdf.values),
        gcs_pdf: gcs(&pdf.values),
        gapi_pdf: gapi(&pdf.values, lit),
        gapi_cdf: gapi(&cdf.values, lit),
        adpi_cdf: adpi(&fft_magnitudes(&cdf.values)?, lit),
    })
}

/// Extracts the per-sensor feature set of one window.
pub fn extract_all(window: &ReadingWindow, opts: &FeatureOptions) -> Result<FeatureVector> {
    let n = window.len();
    if n < 2 || !n.is_power_of_two() || window.axes.iter().any(|a| a.len() != n) {
        return Err(Error::Contract(format!(
            "window {} of {}: length {n} is not a power-of-two window with equal axes",
            window.window_index, window.sensor_id
        )));
    }
    if window.axes.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Contract(format!(
            "window {} of {} contains non-finite readings",
            window.window_index, window.sensor_id
        )));
    }
    let ax = [
        axis_features(&window.axes[0], opts)?,
        axis_features(&window.axes[1], opts)?,
        axis_features(&window.axes[2], opts)?,
    ];
    let mut values = Vec::with_capacity(FEATURES_PER_SENSOR + 3);
    let mut per_axis = |f: fn(&AxisFeatures) -> f64| values.extend(ax.iter().map(f));
    per_axis(|a| a.mean);
    per_axis(|a| a.sd);
    per_axis(|a| a.entropy);
    per_axis(|a| a.mad);
    values.push(mrw(&window.axes[0], &window.axes[1], &window.axes[2]));
    let mut per_axis = |f: fn(&AxisFeatures) -> f64| values.extend(ax.iter().map(f));
    per_axis(|a| a.gcs_cdf);
    if opts.include_gcs_pdf {
        per_axis(|a| a.gcs_pdf);
    }
    per_axis(|a| a.gapi_pdf);
    per_axis(|a| a.gapi_cdf);
    per_axis(|a| a.adpi_cdf);

    let symbols = feature_symbols(opts);
    debug_assert_eq!(symbols.len(), values.len());
    Ok(FeatureVector {
        sensor_id: window.sensor_id.clone(),
        entries: symbols
            .into_iter()
            .zip(values)
            .map(|(s, v)| (format!("{s}@{}", window.sensor_id), v))
            .collect(),
    })
}

/// Extracts every instance into a feature matrix. Columns are grouped by
/// sensor in name order; every instance must carry the same sensor set.
pub fn extract_instances(
    instances: &[RawInstance],
    opts: &FeatureOptions,
    exec: Exec,
) -> Result<FeatureMatrix> {
    let first = instances.first().ok_or_else(|| Error::Data("no instances to extract".into()))?;
    let sensors: Vec<&String> = first.windows.keys().collect();
    if let Some(bad) = instances.iter().find(|i| !i.windows.keys().eq(sensors.iter().copied())) {
        return Err(Error::Data(format!(
            "instance {} has a different sensor set than instance {}",
            bad.window_index, first.window_index
        )));
    }
    let columns: Vec<String> = sensors
        .iter()
        .flat_map(|s| feature_symbols(opts).into_iter().map(move |f| format!("{f}@{s}")))
        .collect();
    let rows = exec.try_map(instances, |inst| -> Result<Vec<f64>> {
        let mut row = Vec::with_capacity(columns.len());
        for w in inst.windows.values() {
            row.extend(extract_all(w, opts)?.entries.into_iter().map(|(_, v)| v));
        }
        Ok(row)
    })?;
    Ok(FeatureMatrix {
        columns,
        rows,
        labels: instances.iter().map(|i| i.label).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(axes: [Vec<f64>; 3]) -> ReadingWindow {
        ReadingWindow::from_axes("acc", 0, axes).unwrap()
    }

    #[test]
    fn symbols_table() {
        let s = feature_symbols(&FeatureOptions::default());
        assert_eq!(s.len(), FEATURES_PER_SENSOR);
        assert_eq!(s[0], "Mean-X");
        assert_eq!(s[12], "MRW");
        assert_eq!(s[24], "FFT-ADPI-CDF-Z");
        let with_pdf = feature_symbols(&FeatureOptions { include_gcs_pdf: true, ..Default::default() });
        assert_eq!(with_pdf.len(), 28);
        assert!(with_pdf.contains(&"GCS-PDF-Y".to_string()));
    }

    #[test]
    fn constant_window() {
        let c = 1.75;
        let fv = extract_all(&window([vec![c; 512], vec![c; 512], vec![c; 512]]), &FeatureOptions::default())
            .unwrap();
        assert_eq!(fv.len(), 25);
        assert!(fv.entries.iter().all(|(_, v)| v.is_finite()));
        assert_eq!(fv.get("Mean-Y@acc"), Some(c));
        for key in ["SD-X", "MAD-Z", "GCS-CDF-X", "GAPI-PDF-Y", "GAPI-CDF-Z", "FFT-ADPI-CDF-X"] {
            assert_eq!(fv.get(&format!("{key}@acc")), Some(0.0), "{key}");
        }
        let floor = 0.5 * (std::f64::consts::TAU * std::f64::consts::E * 1e-12).ln();
        assert_eq!(fv.get("Entropy-X@acc"), Some(floor));
        assert!((fv.get("MRW@acc").unwrap() - 3f64.sqrt() * c).abs() < 1e-12);
    }

    #[test]
    fn spike_window_is_finite() {
        let mut x = vec![0.0; 512];
        x[200] = 1e6;
        let fv = extract_all(&window([x, vec![0.0; 512], vec![-3.0; 512]]), &FeatureOptions::default())
            .unwrap();
        assert!(fv.entries.iter().all(|(_, v)| v.is_finite()));
    }

    #[test]
    fn rejects_bad_windows() {
        let w = window([vec![0.0; 500], vec![0.0; 500], vec![0.0; 500]]);
        assert!(matches!(extract_all(&w, &FeatureOptions::default()), Err(Error::Contract(_))));
        let mut x = vec![0.0; 512];
        x[3] = f64::NAN;
        let w = window([x, vec![0.0; 512], vec![0.0; 512]]);
        assert!(extract_all(&w, &FeatureOptions::default()).is_err());
    }
}
