//! Logistic regression (IRLS with a small ridge) and linear discriminant
//! analysis (pooled covariance, closed form).

use serde::{Deserialize, Serialize};

use super::sigmoid;
use crate::util::solve_linear;
use crate::{HrvError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticParams {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LogisticParams {
    pub fn score(&self, z: &[f64]) -> f64 {
        let eta = self.intercept
            + self
                .coefficients
                .iter()
                .zip(z)
                .map(|(c, v)| c * v)
                .sum::<f64>();
        sigmoid(eta)
    }
}

/// Iteratively reweighted least squares with L2 ridge on all coefficients.
#[allow(clippy::needless_range_loop)]
pub fn fit_logistic(x: &[Vec<f64>], y: &[u8], ridge: f64) -> LogisticParams {
    let n = x.len();
    let p = x[0].len();
    let dim = p + 1; // intercept first
    let mut beta = vec![0.0f64; dim];

    for _ in 0..50 {
        // Weighted normal equations: (X'WX + ridge I) beta_new = X'W z.
        let mut a = vec![vec![0.0f64; dim]; dim];
        let mut rhs = vec![0.0f64; dim];
        for i in 0..n {
            let mut eta = beta[0];
            for j in 0..p {
                eta += beta[j + 1] * x[i][j];
            }
            let mu = sigmoid(eta);
            let w = (mu * (1.0 - mu)).max(1e-10);
            let z = eta + (y[i] as f64 - mu) / w;
            let mut xi = Vec::with_capacity(dim);
            xi.push(1.0);
            xi.extend_from_slice(&x[i]);
            for r in 0..dim {
                for c in r..dim {
                    a[r][c] += w * xi[r] * xi[c];
                }
                rhs[r] += w * xi[r] * z;
            }
        }
        for r in 0..dim {
            for c in 0..r {
                a[r][c] = a[c][r];
            }
            a[r][r] += ridge;
        }
        let Some(next) = solve_linear(&mut a, &mut rhs) else {
            break;
        };
        let delta = beta
            .iter()
            .zip(&next)
            .map(|(b, n)| (b - n).abs())
            .fold(0.0f64, f64::max);
        beta = next;
        if delta < 1e-10 {
            break;
        }
    }

    LogisticParams {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LdaParams {
    pub weights: Vec<f64>,
    /// Constant term: -w . (mu0 + mu1)/2 + ln(pi1/pi0).
    pub offset: f64,
}

impl LdaParams {
    pub fn score(&self, z: &[f64]) -> f64 {
        let m = self.weights.iter().zip(z).map(|(w, v)| w * v).sum::<f64>() + self.offset;
        sigmoid(m)
    }
}

/// Closed-form LDA on the pooled within-class covariance with diagonal
/// loading.
#[allow(clippy::needless_range_loop)]
pub fn fit_lda(x: &[Vec<f64>], y: &[u8], loading: f64) -> Result<LdaParams> {
    let p = x[0].len();
    let mut mu = [vec![0.0f64; p], vec![0.0f64; p]];
    let mut counts = [0usize; 2];
    for (row, &label) in x.iter().zip(y) {
        counts[label as usize] += 1;
        for (m, v) in mu[label as usize].iter_mut().zip(row) {
            *m += v;
        }
    }
    for c in 0..2 {
        for m in &mut mu[c] {
            *m /= counts[c] as f64;
        }
    }

    let mut cov = vec![vec![0.0f64; p]; p];
    for (row, &label) in x.iter().zip(y) {
        let m = &mu[label as usize];
        for r in 0..p {
            let dr = row[r] - m[r];
            for c in r..p {
                cov[r][c] += dr * (row[c] - m[c]);
            }
        }
    }
    let denom = (x.len() - 2) as f64;
    for r in 0..p {
        for c in r..p {
            cov[r][c] /= denom;
            cov[c][r] = cov[r][c];
        }
        cov[r][r] += loading;
    }

    let mut diff: Vec<f64> = mu[1].iter().zip(&mu[0]).map(|(a, b)| a - b).collect();
    let weights = solve_linear(&mut cov, &mut diff).ok_or(HrvError::SingularCovariance)?;
    let mid: f64 = weights
        .iter()
        .enumerate()
        .map(|(j, w)| w * 0.5 * (mu[0][j] + mu[1][j]))
        .sum();
    let prior = (counts[1] as f64 / counts[0] as f64).ln();
    Ok(LdaParams {
        weights,
        offset: prior - mid,
    })
}
