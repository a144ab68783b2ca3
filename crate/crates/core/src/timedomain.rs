//! Time-domain HRV indexes: mean RR/HR, pcNN thresholds, SDNN, RMSSD, and the
//! 5-minute-window statistics SDANN and SDNNIDX.

use crate::ingest::NNSeries;
use crate::util::{mean, sample_sd};
use crate::{HrvError, Result};

const WINDOW_MS: f64 = 300_000.0;

#[derive(Debug, Clone, Copy)]
pub struct TimeDomainIndexes {
    pub mean_rr_ms: f64,
    pub mean_hr_bpm: f64,
    pub pcnn20_pct: f64,
    pub pcnn30_pct: f64,
    pub pcnn50_pct: f64,
    pub sdnn_ms: f64,
    pub rmssd_ms: f64,
    /// Sample SD of 5-minute-window mean NN; absent when fewer than two
    /// complete windows are available.
    pub sdann_ms: Option<f64>,
    /// Mean of 5-minute-window sample SDs; absent like `sdann_ms`.
    pub sdnnidx_ms: Option<f64>,
}

/// Compute the time-domain index panel.
///
/// SDNN uses the sample (n-1) convention; RMSSD divides by the number of
/// successive differences; pcNN thresholds are strict (`|diff| > XX ms`).
/// SDANN/SDNNIDX use 5-minute windows anchored at the first NN onset, keeping
/// only complete windows that contain at least two intervals.
pub fn time_domain(nn: &NNSeries) -> Result<TimeDomainIndexes> {
    let x = &nn.intervals_ms;
    if x.len() < 2 {
        return Err(HrvError::TooFewIntervals);
    }
    let mean_rr = mean(x);
    let sdnn = sample_sd(x);

    let diffs: Vec<f64> = x.windows(2).map(|p| p[1] - p[0]).collect();
    let rmssd = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    let pcnn = |threshold: f64| {
        100.0 * diffs.iter().filter(|d| d.abs() > threshold).count() as f64 / diffs.len() as f64
    };

    let (sdann, sdnnidx) = five_minute_stats(nn);

    Ok(TimeDomainIndexes {
        mean_rr_ms: mean_rr,
        mean_hr_bpm: 60_000.0 / mean_rr,
        pcnn20_pct: pcnn(20.0),
        pcnn30_pct: pcnn(30.0),
        pcnn50_pct: pcnn(50.0),
        sdnn_ms: sdnn,
        rmssd_ms: rmssd,
        sdann_ms: sdann,
        sdnnidx_ms: sdnnidx,
    })
}

fn five_minute_stats(nn: &NNSeries) -> (Option<f64>, Option<f64>) {
    let first_onset = nn.onset_ms[0];
    let span_end = nn.onset_ms.last().unwrap() + nn.intervals_ms.last().unwrap();
    let complete_windows = ((span_end - first_onset) / WINDOW_MS).floor() as usize;
    if complete_windows < 2 {
        return (None, None);
    }

    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); complete_windows];
    for (&rr, &onset) in nn.intervals_ms.iter().zip(&nn.onset_ms) {
        let idx = ((onset - first_onset) / WINDOW_MS).floor() as usize;
        if idx < complete_windows {
            buckets[idx].push(rr);
        }
    }

    let mut window_means = Vec::new();
    let mut window_sds = Vec::new();
    for bucket in &buckets {
        if bucket.len() >= 2 {
            window_means.push(mean(bucket));
            window_sds.push(sample_sd(bucket));
        }
    }
    if window_means.len() < 2 {
        return (None, None);
    }
    (Some(sample_sd(&window_means)), Some(mean(&window_sds)))
}
