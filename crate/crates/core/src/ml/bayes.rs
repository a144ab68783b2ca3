//! Gaussian naive Bayes with a per-feature variance floor.

use serde::{Deserialize, Serialize};

use super::sigmoid;
use crate::util::sample_variance;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    /// ln(pi_mi / pi_healthy).
    pub prior_log_odds: f64,
    /// Per-class feature means, `means[class][feature]`.
    pub means: Vec<Vec<f64>>,
    /// Per-class feature variances, floored.
    pub variances: Vec<Vec<f64>>,
}

impl NaiveBayesParams {
    pub fn score(&self, z: &[f64]) -> f64 {
        let mut log_odds = self.prior_log_odds;
        for (j, &v) in z.iter().enumerate() {
            log_odds += gaussian_log_density(v, self.means[1][j], self.variances[1][j])
                - gaussian_log_density(v, self.means[0][j], self.variances[0][j]);
        }
        sigmoid(log_odds)
    }
}

fn gaussian_log_density(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * (var.ln() + d * d / var)
}

pub fn fit(x: &[Vec<f64>], y: &[u8], variance_floor: f64) -> NaiveBayesParams {
    let p = x[0].len();
    let mut means = vec![vec![0.0f64; p]; 2];
    let mut variances = vec![vec![0.0f64; p]; 2];
    let mut counts = [0usize; 2];
    for &label in y {
        counts[label as usize] += 1;
    }
    for class in 0..2usize {
        for j in 0..p {
            let column: Vec<f64> = x
                .iter()
                .zip(y)
                .filter(|(_, &l)| l as usize == class)
                .map(|(row, _)| row[j])
                .collect();
            means[class][j] = crate::util::mean(&column);
            variances[class][j] = sample_variance(&column).max(variance_floor);
        }
    }
    let prior_log_odds = (counts[1] as f64 / counts[0] as f64).ln();
    NaiveBayesParams {
        prior_log_odds,
        means,
        variances,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{testdata, train, ModelFamily, ModelSpec};
    use super::*;

    #[test]
    fn separates_blobs() {
        let train_data = testdata::blobs(100, 3, 6.0, 11);
        let test_data = testdata::blobs(100, 3, 6.0, 12);
        let model = train(&ModelSpec::new(ModelFamily::NaiveBayes, 1), &train_data).unwrap();
        let correct = test_data
            .values
            .iter()
            .zip(&test_data.labels)
            .filter(|(row, &l)| (model.score(row).unwrap() >= 0.5) == (l == 1))
            .count();
        assert!(correct as f64 / test_data.n_rows() as f64 >= 0.98);
    }

    #[test]
    fn hand_computed_log_odds() {
        // Single feature, equal priors, unit variances, means -1 and +1:
        // log-odds at x is 2x, so score(x) = sigmoid(2x).
        let params = NaiveBayesParams {
            prior_log_odds: 0.0,
            means: vec![vec![-1.0], vec![1.0]],
            variances: vec![vec![1.0], vec![1.0]],
        };
        for &x in &[-2.0f64, -0.5, 0.0, 0.75, 3.0] {
            let expected = 1.0 / (1.0 + (-2.0 * x).exp());
            assert!((params.score(&[x]) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn variance_floor_handles_constant_column() {
        let x = vec![
            vec![1.0, 0.0],
            vec![1.0, 0.1],
            vec![1.0, 1.0],
            vec![1.0, 1.1],
        ];
        let y = vec![0, 0, 1, 1];
        let params = fit(&x, &y, 1e-9);
        assert_eq!(params.variances[0][0], 1e-9);
        assert_eq!(params.variances[1][0], 1e-9);
        let s = params.score(&[1.0, 0.55]);
        assert!(s.is_finite());
    }

    #[test]
    fn unbalanced_priors_shift_scores() {
        let x = vec![
            vec![0.0],
            vec![0.2],
            vec![-0.2],
            vec![0.1],
            vec![-0.1],
            vec![0.0],
        ];
        let y = vec![0, 1, 1, 1, 1, 1];
        let params = fit(&x, &y, 1e-9);
        assert!(params.prior_log_odds > 0.0);
    }
}
