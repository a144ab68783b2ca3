//! k-nearest-neighbor scorer with proportional credit for distance ties at
//! the k-th-neighbor boundary.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl KnnParams {
    /// Fraction of the k neighbor slots filled by MI rows. Rows strictly
    /// inside the k-th distance count fully; rows tied with the k-th distance
    /// share the remaining slots evenly.
    pub fn score(&self, z: &[f64]) -> f64 {
        let k = self.k.min(self.rows.len());
        let mut dists: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let d2 = row
                    .iter()
                    .zip(z)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                (d2, i)
            })
            .collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let boundary = dists[k - 1].0;

        let mut inner = 0usize;
        let mut inner_mi = 0usize;
        let mut tied = 0usize;
        let mut tied_mi = 0usize;
        for &(d2, i) in &dists {
            if d2 < boundary {
                inner += 1;
                inner_mi += self.labels[i] as usize;
            } else if d2 == boundary {
                tied += 1;
                tied_mi += self.labels[i] as usize;
            } else {
                break;
            }
        }
        let share = (k - inner) as f64 / tied as f64;
        (inner_mi as f64 + share * tied_mi as f64) / k as f64
    }
}

pub fn fit(x: &[Vec<f64>], y: &[u8], k: usize) -> KnnParams {
    KnnParams {
        k,
        rows: x.to_vec(),
        labels: y.to_vec(),
    }
}
