//! Gaussian naive Bayes over two classes, evaluated in log space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Label;

/// Relative sigma floor, as a fraction of the feature's global range.
pub const SIGMA_FLOOR_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    /// Indexed by class: 0 = control, 1 = near.
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub sigmas: [Vec<f64>; 2],
}

fn class_of(l: Label) -> usize {
    usize::from(l == Label::Near)
}

impl NaiveBayes {
    pub fn fit(rows: &[Vec<f64>], labels: &[Label]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut count = [0usize; 2];
        for &l in labels {
            count[class_of(l)] += 1;
        }
        if count.contains(&0) {
            return Err(Error::Training("naive Bayes needs instances of both classes".into()));
        }
        let n = rows.len() as f64;
        let mut means = [vec![0.0; d], vec![0.0; d]];
        let mut sigmas = [vec![0.0; d], vec![0.0; d]];
        for (r, &l) in rows.iter().zip(labels) {
            let c = class_of(l);
            for j in 0..d {
                means[c][j] += r[j];
            }
        }
        for c in 0..2 {
            for m in &mut means[c] {
                *m /= count[c] as f64;
            }
        }
        for (r, &l) in rows.iter().zip(labels) {
            let c = class_of(l);
            for j in 0..d {
                let dev = r[j] - means[c][j];
                sigmas[c][j] += dev * dev;
            }
        }
        for j in 0..d {
            let (lo, hi) = rows
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[j]), hi.max(r[j])));
            let range = hi - lo;
            let floor = if range > 0.0 { SIGMA_FLOOR_FRACTION * range } else { SIGMA_FLOOR_FRACTION };
            for c in 0..2 {
                sigmas[c][j] = (sigmas[c][j] / count[c] as f64).sqrt().max(floor);
            }
        }
        Ok(Self { priors: [count[0] as f64 / n, count[1] as f64 / n], means, sigmas })
    }

    /// Unnormalized log posteriors `ln P(c) + sum_j ln N(x_j; mu_cj, sigma_cj)`.
    pub fn log_joint(&self, x: &[f64]) -> [f64; 2] {
        let half_ln_tau = 0.5 * std::f64::consts::TAU.ln();
        let mut out = [0.0; 2];
        for c in 0..2 {
            let ll: f64 = x
                .iter()
                .zip(&self.means[c])
                .zip(&self.sigmas[c])
                .map(|((&v, &m), &s)| {
                    let z = (v - m) / s;
                    -0.5 * z * z - s.ln() - half_ln_tau
                })
                .sum();
            out[c] = self.priors[c].ln() + ll;
        }
        out
    }

    /// `P(near | x)`.
    pub fn posterior_near(&self, x: &[f64]) -> f64 {
        let [lc, ln] = self.log_joint(x);
        1.0 / (1.0 + (lc - ln).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Control as C, Near as N};

    #[test]
    fn balanced_priors_and_single_class_error() {
        let rows = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let nb = NaiveBayes::fit(&rows, &[C, C, N, N]).unwrap();
        assert_eq!(nb.priors, [0.5, 0.5]);
        assert!(NaiveBayes::fit(&rows, &[C, C, C, C]).is_err());
    }

    #[test]
    fn hand_computed_posterior() {
        // class control: x in {0, 2} -> mu 1, sigma 1; near: x in {3, 5} -> mu 4, sigma 1
        let rows = vec![vec![0.0], vec![2.0], vec![3.0], vec![5.0]];
        let nb = NaiveBayes::fit(&rows, &[C, C, N, N]).unwrap();
        assert_eq!(nb.means, [vec![1.0], vec![4.0]]);
        assert_eq!(nb.sigmas, [vec![1.0], vec![1.0]]);
        let x = 2.0;
        let pc = 0.5 * (-(x - 1.0f64).powi(2) / 2.0).exp();
        let pn = 0.5 * (-(x - 4.0f64).powi(2) / 2.0).exp();
        assert!((nb.posterior_near(&[x]) - pn / (pc + pn)).abs() < 1e-9);
    }

    #[test]
    fn identical_feature_does_not_change_posterior() {
        let rows = vec![vec![0.0, 7.0], vec![2.0, 7.0], vec![3.0, 7.0], vec![5.0, 7.0]];
        let nb2 = NaiveBayes::fit(&rows, &[C, C, N, N]).unwrap();
        let rows1: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0]]).collect();
        let nb1 = NaiveBayes::fit(&rows1, &[C, C, N, N]).unwrap();
        for x in [-1.0, 1.5, 2.5, 9.0] {
            let a = nb1.posterior_near(&[x]);
            let b = nb2.posterior_near(&[x, 7.0]);
            assert!((a - b).abs() < 1e-12);
        }
        assert!(nb2.sigmas[0][1] > 0.0);
    }
}
