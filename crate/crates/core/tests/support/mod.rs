//! Independent reference implementations used as test oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// O(N^2) DFT magnitudes.
pub fn naive_dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &v) in x.iter().enumerate() {
                // reduce the phase index first to keep the angle small
                let ang = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            re.hypot(im)
        })
        .collect()
}

/// Differential entropy of a Gaussian with variance `var`, in nats.
pub fn gaussian_entropy(var: f64) -> f64 {
    0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * var).ln()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None`
/// if the matrix is numerically singular.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

pub struct QpOptimum {
    pub objective: f64,
    pub alpha: Vec<f64>,
    pub bias: f64,
}

/// Exhaustive SVM dual oracle for tiny problems: every assignment of each
/// multiplier to {0, C, free} is tried; the free block is solved from the
/// stationarity conditions plus the equality constraint, and the best
/// feasible candidate wins. Exponential in n; meant for n <= 8.
pub fn brute_force_svm_dual(k: &[Vec<f64>], y: &[f64], c: f64) -> QpOptimum {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];
    let objective = |a: &[f64]| {
        let lin: f64 = a.iter().sum();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += a[i] * a[j] * q(i, j);
            }
        }
        lin - 0.5 * quad
    };
    let mut best: Option<QpOptimum> = None;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut c_ = code;
        for s in state.iter_mut() {
            *s = (c_ % 3) as u8;
            c_ /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha: Vec<f64> = state.iter().map(|&s| if s == 1 { c } else { 0.0 }).collect();
        let mut nu = None;
        if free.is_empty() {
            let eq: f64 = alpha.iter().zip(y).map(|(a, yi)| a * yi).sum();
            if eq.abs() > 1e-9 {
                continue;
            }
        } else {
            // [Q_FF  -y_F] [a_F]   [1 - Q_FB a_B]
            // [y_F'    0 ] [nu ] = [ -y_B' a_B  ]
            let m = free.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut b = vec![0.0; m + 1];
            for (r, &i) in free.iter().enumerate() {
                for (cc, &j) in free.iter().enumerate() {
                    a[r][cc] = q(i, j);
                }
                a[r][m] = -y[i];
                a[m][r] = y[i];
                b[r] = 1.0 - (0..n).filter(|j| state[*j] == 1).map(|j| q(i, j) * c).sum::<f64>();
            }
            b[m] = -(0..n).filter(|j| state[*j] == 1).map(|j| y[j] * c).sum::<f64>();
            let Some(sol) = solve_linear(a, b) else { continue };
            if free.iter().enumerate().any(|(r, _)| sol[r] < -1e-9 || sol[r] > c + 1e-9) {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r].clamp(0.0, c);
            }
            nu = Some(sol[m]);
        }
        let obj = objective(&alpha);
        if best.as_ref().is_none_or(|b| obj > b.objective + 1e-12) {
            let bias = match nu {
                Some(v) => -v,
                None => bound_bias(&alpha, y, k),
            };
            best = Some(QpOptimum { objective: obj, alpha, bias });
        }
    }
    best.expect("alpha = 0 is always feasible")
}

/// Midpoint of the feasible bias interval when no multiplier is free.
fn bound_bias(alpha: &[f64], y: &[f64], k: &[Vec<f64>]) -> f64 {
    let n = y.len();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for t in 0..n {
        let wx: f64 = (0..n).map(|j| alpha[j] * y[j] * k[j][t]).sum();
        let g = y[t] - wx;
        let at_zero = alpha[t] <= 0.0;
        if (at_zero && y[t] > 0.0) || (!at_zero && y[t] < 0.0) {
            lo = lo.max(g);
        } else {
            hi = hi.min(g);
        }
    }
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo,
        (false, true) => hi,
        _ => 0.0,
    }
}

/// Random 2-D binary dataset with both classes present; `overlap` in
/// [0, 1] pulls the class means together.
pub fn random_svm_dataset(rng: &mut impl Rng, n: usize, overlap: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    loop {
        let y: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        if !y.contains(&1.0) || !y.contains(&-1.0) {
            continue;
        }
        let shift = 1.5 * (1.0 - overlap);
        let x = y
            .iter()
            .map(|&yi| {
                vec![
                    rng.random_range(-1.0..1.0) + yi * shift,
                    rng.random_range(-1.0..1.0) + 0.5 * yi * shift,
                ]
            })
            .collect();
        return (x, y);
    }
}
