//! Gaussian PDF/CDF transforms and the peak-based features built on them.

use std::f64::consts::{SQRT_2, TAU};

use super::erf::erf;
use super::fft::fft_magnitudes;
use super::stats::GaussianStats;
use crate::error::Result;

/// Below this standard deviation a window is treated as degenerate.
pub const SIGMA_GUARD: f64 = 1e-12;

/// A PDF- or CDF-transformed axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub values: Vec<f64>,
    /// Set when the window's sigma fell below [`SIGMA_GUARD`].
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Pdf,
    Cdf,
}

/// Elementwise Gaussian density under the window's own mean and sigma.
/// Degenerate windows map to all zeros.
pub fn pdf_transform(values: &[f64]) -> Transformed {
    let s = GaussianStats::of(values);
    if s.sigma < SIGMA_GUARD {
        return Transformed { values: vec![0.0; values.len()], degenerate: true };
    }
    let norm = 1.0 / (s.sigma * TAU.sqrt());
    let out = values
        .iter()
        .map(|r| {
            let d = r - s.mu;
            norm * (-(d * d) / (2.0 * s.sigma_sq)).exp()
        })
        .collect();
    Transformed { values: out, degenerate: false }
}

/// Elementwise Gaussian CDF under the window's own mean and sigma.
/// Degenerate windows map to all 0.5.
pub fn cdf_transform(values: &[f64]) -> Transformed {
    let s = GaussianStats::of(values);
    if s.sigma < SIGMA_GUARD {
        return Transformed { values: vec![0.5; values.len()], degenerate: true };
    }
    let scale = 1.0 / (s.sigma * SQRT_2);
    let out = values.iter().map(|r| (0.5 * (1.0 + erf((r - s.mu) * scale))).clamp(0.0, 1.0)).collect();
    Transformed { values: out, degenerate: false }
}

/// Gaussian coverage strength: `max - min` of a transformed series.
pub fn gcs(dist: &[f64]) -> f64 {
    if dist.is_empty() {
        return 0.0;
    }
    let (lo, hi) = dist
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Strict interior local maxima. Endpoints are never peaks and a plateau
/// (equal neighbours) never yields one.
pub fn detect_peaks(series: &[f64]) -> Vec<(usize, f64)> {
    if series.len() < 3 {
        return Vec::new();
    }
    series
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] && w[1] > w[2])
        .map(|(i, w)| (i + 1, w[1]))
        .collect()
}

/// Sums consecutive differences of `values`; absolute by default, signed
/// (telescoping) when `literal`.
fn interval_sum(values: &[f64], literal: bool) -> f64 {
    values
        .windows(2)
        .map(|p| if literal { p[0] - p[1] } else { (p[0] - p[1]).abs() })
        .sum()
}

/// Gaussian average peak interval over a PDF- or CDF-transformed series:
/// consecutive log-differences of the positive peak values, divided by the
/// window length. Fewer than two usable peaks give 0.
pub fn gapi(dist: &[f64], literal: bool) -> f64 {
    let logs: Vec<f64> =
        detect_peaks(dist).into_iter().filter(|&(_, v)| v > 0.0).map(|(_, v)| v.ln()).collect();
    if logs.len() < 2 {
        return 0.0;
    }
    interval_sum(&logs, literal) / dist.len() as f64
}

/// Average distinct peak interval of FFT magnitudes: peaks of the magnitude
/// spectrum at or above its mean, consecutive value differences, divided by
/// the window length.
pub fn adpi(magnitudes: &[f64], literal: bool) -> f64 {
    if magnitudes.is_empty() {
        return 0.0;
    }
    let mean = magnitudes.iter().sum::<f64>() / magnitudes.len() as f64;
    let distinct: Vec<f64> =
        detect_peaks(magnitudes).into_iter().filter(|&(_, v)| v >= mean).map(|(_, v)| v).collect();
    if distinct.len() < 2 {
        return 0.0;
    }
    interval_sum(&distinct, literal) / magnitudes.len() as f64
}

/// CDF transform, FFT magnitudes, then [`adpi`].
pub fn fft_adpi_cdf(values: &[f64], literal: bool) -> Result<f64> {
    let cdf = cdf_transform(values);
    let mags = fft_magnitudes(&cdf.values)?;
    Ok(adpi(&mags, literal))
}
