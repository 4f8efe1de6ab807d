//! Single-hidden-layer perceptron with sigmoid units, trained by online
//! backpropagation with momentum on squared error.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Weights are stored row-major with the bias as the last column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub n_outputs: usize,
    /// `n_hidden x (n_inputs + 1)`
    pub hidden: Vec<f64>,
    /// `n_outputs x (n_hidden + 1)`
    pub output: Vec<f64>,
}

pub struct Activations {
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct MlpSchedule {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
}

impl Mlp {
    /// Weights drawn uniformly from [-0.5, 0.5].
    pub fn init(n_inputs: usize, n_hidden: usize, n_outputs: usize, rng: &mut impl Rng) -> Self {
        let mut draw = |n: usize| (0..n).map(|_| rng.random_range(-0.5..=0.5)).collect::<Vec<f64>>();
        let hidden = draw(n_hidden * (n_inputs + 1));
        let output = draw(n_outputs * (n_hidden + 1));
        Self { n_inputs, n_hidden, n_outputs, hidden, output }
    }

    pub fn n_params(&self) -> usize {
        self.hidden.len() + self.output.len()
    }

    pub fn params(&self) -> Vec<f64> {
        self.hidden.iter().chain(&self.output).copied().collect()
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let h = self.hidden.len();
        self.hidden.copy_from_slice(&p[..h]);
        self.output.copy_from_slice(&p[h..]);
    }

    pub fn forward(&self, x: &[f64]) -> Activations {
        let ni = self.n_inputs;
        let hidden: Vec<f64> = (0..self.n_hidden)
            .map(|h| {
                let w = &self.hidden[h * (ni + 1)..(h + 1) * (ni + 1)];
                sigmoid(w[..ni].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[ni])
            })
            .collect();
        let nh = self.n_hidden;
        let output = (0..self.n_outputs)
            .map(|o| {
                let w = &self.output[o * (nh + 1)..(o + 1) * (nh + 1)];
                sigmoid(w[..nh].iter().zip(&hidden).map(|(a, b)| a * b).sum::<f64>() + w[nh])
            })
            .collect();
        Activations { hidden, output }
    }

    /// Squared error `1/2 sum_k (o_k - t_k)^2` of one example.
    pub fn loss(&self, x: &[f64], target: &[f64]) -> f64 {
        let act = self.forward(x);
        act.output.iter().zip(target).map(|(o, t)| 0.5 * (o - t) * (o - t)).sum()
    }

    /// Gradient of [`Mlp::loss`] w.r.t. the flattened parameters.
    pub fn gradient(&self, x: &[f64], target: &[f64]) -> Vec<f64> {
        let (ni, nh) = (self.n_inputs, self.n_hidden);
        let act = self.forward(x);
        let delta_out: Vec<f64> = act
            .output
            .iter()
            .zip(target)
            .map(|(o, t)| (o - t) * o * (1.0 - o))
            .collect();
        let delta_hidden: Vec<f64> = (0..nh)
            .map(|h| {
                let back: f64 =
                    delta_out.iter().enumerate().map(|(o, d)| d * self.output[o * (nh + 1) + h]).sum();
                back * act.hidden[h] * (1.0 - act.hidden[h])
            })
            .collect();
        let mut g = vec![0.0; self.n_params()];
        for h in 0..nh {
            let row = &mut g[h * (ni + 1)..(h + 1) * (ni + 1)];
            for i in 0..ni {
                row[i] = delta_hidden[h] * x[i];
            }
            row[ni] = delta_hidden[h];
        }
        let off = self.hidden.len();
        for (o, d) in delta_out.iter().enumerate() {
            let row = &mut g[off + o * (nh + 1)..off + (o + 1) * (nh + 1)];
            for h in 0..nh {
                row[h] = d * act.hidden[h];
            }
            row[nh] = *d;
        }
        g
    }

    /// Online training; examples are visited in a fresh seeded order each epoch.
    pub fn train(
        &mut self,
        xs: &[Vec<f64>],
        targets: &[Vec<f64>],
        schedule: MlpSchedule,
        rng: &mut ChaCha8Rng,
    ) -> Result<()> {
        let mut velocity = vec![0.0; self.n_params()];
        let mut order: Vec<usize> = (0..xs.len()).collect();
        for epoch in 0..schedule.epochs {
            order.shuffle(rng);
            let mut epoch_loss = 0.0;
            for &i in &order {
                epoch_loss += self.loss(&xs[i], &targets[i]);
                let g = self.gradient(&xs[i], &targets[i]);
                let split = self.hidden.len();
                let params = self.hidden.iter_mut().chain(self.output.iter_mut());
                for ((p, v), g) in params.zip(velocity.iter_mut()).zip(&g) {
                    *v = -schedule.learning_rate * g + schedule.momentum * *v;
                    *p += *v;
                }
                debug_assert_eq!(split + self.output.len(), g.len());
            }
            if !epoch_loss.is_finite() {
                return Err(Error::Training(format!("MLP diverged: non-finite loss at epoch {epoch}")));
            }
        }
        Ok(())
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(3);
        let net = Mlp::init(3, 4, 2, &mut rng);
        let xs = [vec![0.2, 0.9, 0.1], vec![0.7, 0.3, 0.5], vec![1.0, 0.0, 0.4]];
        let ts = [vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]];
        let total_grad = xs.iter().zip(&ts).fold(vec![0.0; net.n_params()], |acc, (x, t)| {
            acc.iter().zip(net.gradient(x, t)).map(|(a, b)| a + b).collect()
        });
        let loss = |n: &Mlp| xs.iter().zip(&ts).map(|(x, t)| n.loss(x, t)).sum::<f64>();
        let h = 1e-6;
        for k in 0..net.n_params() {
            let mut p = net.params();
            p[k] += h;
            let mut plus = net.clone();
            plus.set_params(&p);
            p[k] -= 2.0 * h;
            let mut minus = net.clone();
            minus.set_params(&p);
            let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let rel = (fd - total_grad[k]).abs() / fd.abs().max(total_grad[k].abs()).max(1e-8);
            assert!(rel < 1e-4, "param {k}: fd {fd} vs {}", total_grad[k]);
        }
    }

    #[test]
    fn zero_rate_keeps_initial_weights() {
        let mut rng = rng_from_seed(1);
        let mut net = Mlp::init(2, 2, 2, &mut rng);
        let before = net.clone();
        let sched = MlpSchedule { learning_rate: 0.0, momentum: 0.2, epochs: 1 };
        net.train(&[vec![0.0, 1.0]], &[vec![0.0, 1.0]], sched, &mut rng).unwrap();
        assert_eq!(net, before);
    }
}
