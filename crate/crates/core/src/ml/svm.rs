//! Linear soft-margin SVM trained with the Pegasos stochastic subgradient
//! method, with Platt sigmoid calibration of the decision values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sigmoid;
use crate::util::mix_seed;

const SVM_SEED_STREAM: u64 = 0x5356_4d00;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmParams {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Platt calibration: score = sigmoid(platt_a * margin + platt_b).
    pub platt_a: f64,
    pub platt_b: f64,
}

impl SvmParams {
    pub fn margin(&self, z: &[f64]) -> f64 {
        self.weights.iter().zip(z).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn score(&self, z: &[f64]) -> f64 {
        sigmoid(self.platt_a * self.margin(z) + self.platt_b)
    }
}

pub fn fit(x: &[Vec<f64>], y: &[u8], c: f64, epochs: usize, seed: u64) -> SvmParams {
    let n = x.len();
    let p = x[0].len();
    let lambda = 1.0 / (c * n as f64);
    let signed: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, SVM_SEED_STREAM));
    let mut w = vec![0.0f64; p];
    let mut b = 0.0f64;
    let steps = epochs * n;
    for t in 1..=steps {
        let i = rng.random_range(0..n);
        let eta = 1.0 / (lambda * t as f64);
        let margin = signed[i] * (w.iter().zip(&x[i]).map(|(a, v)| a * v).sum::<f64>() + b);
        let shrink = 1.0 - eta * lambda;
        for wj in w.iter_mut() {
            *wj *= shrink;
        }
        if margin < 1.0 {
            for (wj, v) in w.iter_mut().zip(&x[i]) {
                *wj += eta * signed[i] * v;
            }
            b += eta * lambda * signed[i]; // scaled step keeps the bias stable
        }
    }

    let margins: Vec<f64> = x
        .iter()
        .map(|row| w.iter().zip(row).map(|(a, v)| a * v).sum::<f64>() + b)
        .collect();
    let (platt_a, platt_b) = platt_calibrate(&margins, y);
    SvmParams {
        weights: w,
        bias: b,
        platt_a,
        platt_b,
    }
}

/// Newton fit of sigmoid(a*m + b) to regularized targets (Platt 1999 with the
/// Lin-Weng target correction).
fn platt_calibrate(margins: &[f64], y: &[u8]) -> (f64, f64) {
    let n_pos = y.iter().filter(|&&l| l == 1).count() as f64;
    let n_neg = y.len() as f64 - n_pos;
    let t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    let t_neg = 1.0 / (n_neg + 2.0);
    let targets: Vec<f64> = y
        .iter()
        .map(|&l| if l == 1 { t_pos } else { t_neg })
        .collect();

    let loss = |a: f64, b: f64| -> f64 {
        margins
            .iter()
            .zip(&targets)
            .map(|(&m, &t)| {
                let p = sigmoid(a * m + b).clamp(1e-12, 1.0 - 1e-12);
                -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
            })
            .sum()
    };

    let mut a = 0.0f64;
    let mut b = ((n_pos + 1.0) / (n_neg + 1.0)).ln();
    let mut current = loss(a, b);
    for _ in 0..100 {
        let mut g = [0.0f64; 2];
        let mut h = [[1e-12f64, 0.0], [0.0, 1e-12f64]];
        for (&m, &t) in margins.iter().zip(&targets) {
            let p = sigmoid(a * m + b);
            let d = p - t;
            let w = (p * (1.0 - p)).max(1e-12);
            g[0] += d * m;
            g[1] += d;
            h[0][0] += w * m * m;
            h[0][1] += w * m;
            h[1][1] += w;
        }
        h[1][0] = h[0][1];
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let da = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let db = (h[0][0] * g[1] - h[1][0] * g[0]) / det;

        let mut step = 1.0f64;
        let mut improved = false;
        for _ in 0..30 {
            let next = loss(a - step * da, b - step * db);
            if next < current + 1e-12 {
                a -= step * da;
                b -= step * db;
                current = next;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved || da.abs().max(db.abs()) < 1e-10 {
            break;
        }
    }
    (a, b)
}
