//! Largest Lyapunov exponent of the NN series via the Rosenstein method:
//! delay embedding, Theiler-excluded nearest neighbors, and a least-squares
//! fit to the mean log-divergence curve.

use rayon::prelude::*;

use crate::ingest::NNSeries;
use serde::{Deserialize, Serialize};

use crate::util::regression_slope;
use crate::{HrvError, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct LyapunovConfig {
    pub embedding_dim: usize,
    pub delay_samples: usize,
    pub theiler_window: usize,
    /// Divergence steps (inclusive) used for the slope fit.
    pub fit_range_steps: (usize, usize),
    /// Caps for long series: at most this many anchor points, evenly strided.
    pub max_anchors: usize,
    /// Neighbor candidates are strided down to at most this many vectors.
    pub max_candidates: usize,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig {
            embedding_dim: 5,
            delay_samples: 1,
            theiler_window: 10,
            fit_range_steps: (0, 20),
            max_anchors: 2000,
            max_candidates: 20_000,
        }
    }
}

/// Minimum series length; shorter series get no LLE rather than a noisy one.
pub const MIN_INTERVALS: usize = 500;

/// Largest Lyapunov exponent in units of 1/beat.
pub fn lyapunov(nn: &NNSeries, cfg: &LyapunovConfig) -> Result<f64> {
    lyapunov_series(&nn.intervals_ms, cfg)
}

pub fn lyapunov_series(x: &[f64], cfg: &LyapunovConfig) -> Result<f64> {
    let m = cfg.embedding_dim;
    let tau = cfg.delay_samples;
    if x.len() < MIN_INTERVALS || x.len() <= (m - 1) * tau + cfg.fit_range_steps.1 {
        return Err(HrvError::TooFewIntervals);
    }
    let n_vec = x.len() - (m - 1) * tau;
    let dist2 = |i: usize, j: usize| -> f64 {
        let mut acc = 0.0;
        for d in 0..m {
            let diff = x[i + d * tau] - x[j + d * tau];
            acc += diff * diff;
        }
        acc
    };

    let anchor_stride = n_vec.div_ceil(cfg.max_anchors).max(1);
    let candidate_stride = n_vec.div_ceil(cfg.max_candidates).max(1);
    let k_max = cfg.fit_range_steps.1;

    // Per-anchor log-divergence tracks, computed independently then folded in
    // anchor order so results are deterministic regardless of thread count.
    let tracks: Vec<Option<Vec<f64>>> = (0..n_vec)
        .step_by(anchor_stride)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i| {
            let mut best = f64::INFINITY;
            let mut best_j = usize::MAX;
            let mut j = 0;
            while j < n_vec {
                if i.abs_diff(j) > cfg.theiler_window {
                    let d2 = dist2(i, j);
                    if d2 > 0.0 && d2 < best {
                        best = d2;
                        best_j = j;
                    }
                }
                j += candidate_stride;
            }
            if best_j == usize::MAX {
                return None;
            }
            let steps = k_max.min(n_vec - 1 - i).min(n_vec - 1 - best_j);
            let mut track = Vec::with_capacity(steps + 1);
            for k in 0..=steps {
                let d2 = dist2(i + k, best_j + k);
                track.push(if d2 > 0.0 { 0.5 * d2.ln() } else { f64::NAN });
            }
            Some(track)
        })
        .collect();

    let mut sums = vec![0.0f64; k_max + 1];
    let mut counts = vec![0usize; k_max + 1];
    for track in tracks.into_iter().flatten() {
        for (k, v) in track.into_iter().enumerate() {
            if v.is_finite() {
                sums[k] += v;
                counts[k] += 1;
            }
        }
    }

    let (lo, hi) = cfg.fit_range_steps;
    let mut ks = Vec::new();
    let mut ys = Vec::new();
    for k in lo..=hi {
        if counts[k] > 0 {
            ks.push(k as f64);
            ys.push(sums[k] / counts[k] as f64);
        }
    }
    if ks.len() < 2 {
        return Err(HrvError::NoValidNeighbors);
    }
    Ok(regression_slope(&ks, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn periodic_series_has_no_divergence() {
        let pattern = [800.0, 760.0, 820.0, 790.0, 840.0, 770.0, 810.0];
        let x: Vec<f64> = (0..2000).map(|i| pattern[i % 7]).collect();
        let lle = lyapunov_series(&x, &LyapunovConfig::default()).unwrap();
        assert!(lle.abs() <= 0.01, "lle {lle}");
    }

    #[test]
    fn logistic_map_matches_ln_two() {
        // x_{n+1} = 4 x (1 - x) has analytic exponent ln 2 per step.
        let mut v = 0.31f64;
        let x: Vec<f64> = (0..5000)
            .map(|_| {
                v = 4.0 * v * (1.0 - v);
                600.0 + 400.0 * v
            })
            .collect();
        let cfg = LyapunovConfig {
            fit_range_steps: (0, 5),
            ..LyapunovConfig::default()
        };
        let lle = lyapunov_series(&x, &cfg).unwrap();
        assert!((lle - std::f64::consts::LN_2).abs() <= 0.15, "lle {lle}");
    }

    #[test]
    fn noise_diverges_faster_than_periodic() {
        let pattern = [800.0, 760.0, 820.0, 790.0, 840.0, 770.0, 810.0];
        let periodic: Vec<f64> = (0..2000).map(|i| pattern[i % 7]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let noise: Vec<f64> = (0..2000).map(|_| rng.random_range(600.0..1000.0)).collect();
        let cfg = LyapunovConfig::default();
        let lle_p = lyapunov_series(&periodic, &cfg).unwrap();
        let lle_n = lyapunov_series(&noise, &cfg).unwrap();
        assert!(lle_n > lle_p, "noise {lle_n} vs periodic {lle_p}");
    }

    #[test]
    fn short_series_rejected() {
        let x = vec![800.0; 100];
        assert!(matches!(
            lyapunov_series(&x, &LyapunovConfig::default()),
            Err(HrvError::TooFewIntervals)
        ));
    }

    #[test]
    fn deterministic_for_fixed_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..3000).map(|_| rng.random_range(700.0..900.0)).collect();
        let cfg = LyapunovConfig::default();
        let a = lyapunov_series(&x, &cfg).unwrap();
        let b = lyapunov_series(&x, &cfg).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn anchor_cap_keeps_estimate_close() {
        let mut v = 0.47f64;
        let x: Vec<f64> = (0..5000)
            .map(|_| {
                v = 4.0 * v * (1.0 - v);
                600.0 + 400.0 * v
            })
            .collect();
        let full = LyapunovConfig {
            fit_range_steps: (0, 5),
            ..LyapunovConfig::default()
        };
        let capped = LyapunovConfig {
            max_anchors: 400,
            ..full
        };
        let a = lyapunov_series(&x, &full).unwrap();
        let b = lyapunov_series(&x, &capped).unwrap();
        assert!((a - b).abs() < 0.1, "full {a} capped {b}");
    }
}
