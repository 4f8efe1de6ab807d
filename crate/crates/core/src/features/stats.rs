//! Per-axis summary statistics over a reading window.
//!
//! All divisors are the window length `W_r` (the series length).

/// Variance floor used by the entropy feature.
pub const ENTROPY_VARIANCE_FLOOR: f64 = 1e-12;

/// Neumaier-compensated sum; exact for a run of identical values.
fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean, standard deviation and variance of one axis (population form).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianStats {
    pub mu: f64,
    pub sigma: f64,
    pub sigma_sq: f64,
}

impl GaussianStats {
    pub fn of(values: &[f64]) -> Self {
        let mu = mean(values);
        let n = values.len().max(1) as f64;
        let sigma_sq = compensated_sum(&values.iter().map(|r| (r - mu) * (r - mu)).collect::<Vec<_>>()) / n;
        Self { mu, sigma: sigma_sq.sqrt(), sigma_sq }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    compensated_sum(values) / values.len() as f64
}

/// Population standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    GaussianStats::of(values).sigma
}

/// Differential entropy of the fitted Gaussian, `0.5 ln(2 pi e max(var, 1e-12))`.
pub fn entropy(values: &[f64]) -> f64 {
    let var = GaussianStats::of(values).sigma_sq.max(ENTROPY_VARIANCE_FLOOR);
    0.5 * (std::f64::consts::TAU * std::f64::consts::E * var).ln()
}

/// Mean absolute deviation from the window mean.
pub fn mad(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mu = mean(values);
    compensated_sum(&values.iter().map(|r| (r - mu).abs()).collect::<Vec<_>>()) / values.len() as f64
}

/// Mean resultant weight: `sqrt(sum(x^2 + y^2 + z^2) / W_r)`.
pub fn mrw(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    let sq: Vec<f64> = (0..n).map(|i| x[i] * x[i] + y[i] * y[i] + z[i] * z[i]).collect();
    (compensated_sum(&sq) / n as f64).sqrt()
}
