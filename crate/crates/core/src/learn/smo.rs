//! Soft-margin SVM dual solved by sequential minimal optimization.
//!
//! Solves `max W(a) = sum(a) - 1/2 a'Qa` with `Q_ij = y_i y_j K_ij`,
//! `0 <= a_i <= C` and `sum(a_i y_i) = 0`. Each step picks the maximal
//! violating pair (first-order working-set selection, lowest index on ties),
//! solves the two-variable subproblem analytically and updates the gradient.
//! Iteration stops once the pair's violation drops below the tolerance, which
//! bounds every point's KKT residual by the same tolerance.

/// Floor on the pair curvature, for duplicate points.
const MIN_CURVATURE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// Dual objective `sum(a) - 1/2 a'Qa` at the solution.
    pub objective: f64,
    pub converged: bool,
}

/// Solves the dual for a precomputed kernel matrix `k` and labels `y` in {-1, +1}.
pub fn solve(k: &[Vec<f64>], y: &[f64], c: f64, tol: f64, max_iter: usize) -> SmoSolution {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];
    let mut alpha = vec![0.0; n];
    // gradient of 1/2 a'Qa - e'a
    let mut grad = vec![-1.0; n];

    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let mut i_best: Option<(usize, f64)> = None;
        let mut j_best: Option<(usize, f64)> = None;
        for t in 0..n {
            let f = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && i_best.is_none_or(|(_, m)| f > m) {
                i_best = Some((t, f));
            }
            if in_low(alpha[t], y[t]) && j_best.is_none_or(|(_, m)| f < m) {
                j_best = Some((t, f));
            }
        }
        let (Some((i, m)), Some((j, big_m))) = (i_best, j_best) else {
            converged = true;
            break;
        };
        if m - big_m < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = (k[i][i] + k[j][j] - 2.0 * k[i][j]).max(MIN_CURVATURE);
        let (mut ai, mut aj) = (old_i, old_j);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }
    if !converged {
        log::warn!("SMO stopped after {max_iter} iterations without reaching tolerance {tol}");
    }

    let bias = bias_from_gradient(&alpha, y, &grad, c);
    let objective = alpha.iter().zip(&grad).map(|(a, g)| 0.5 * a - 0.5 * a * g).sum();
    SmoSolution { alpha, bias, iterations, objective, converged }
}

/// Bias: mean over free vectors of `-y_i G_i`, or the midpoint of the
/// feasible interval when every multiplier sits at a bound.
fn bias_from_gradient(alpha: &[f64], y: &[f64], grad: &[f64], c: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free_n = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for t in 0..alpha.len() {
        let f = -y[t] * grad[t];
        let at_zero = alpha[t] <= 0.0;
        let at_c = alpha[t] >= c;
        if !at_zero && !at_c {
            free_sum += f;
            free_n += 1;
        } else if (at_zero && y[t] > 0.0) || (at_c && y[t] < 0.0) {
            lower = lower.max(f);
        } else {
            upper = upper.min(f);
        }
    }
    if free_n > 0 {
        free_sum / free_n as f64
    } else {
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        }
    }
}

/// Indices of training points violating their KKT condition by more than
/// `tol`, given decision values `f` on the training set.
pub fn kkt_violations(alpha: &[f64], y: &[f64], f: &[f64], c: f64, tol: f64) -> Vec<usize> {
    (0..alpha.len())
        .filter(|&t| {
            let margin = y[t] * f[t];
            if alpha[t] <= 0.0 {
                margin < 1.0 - tol
            } else if alpha[t] >= c {
                margin > 1.0 + tol
            } else {
                (margin - 1.0).abs() > tol
            }
        })
        .collect()
}

pub fn linear_kernel(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter().map(|a| x.iter().map(|b| dot(a, b)).collect()).collect()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}
