//! Heart-rate turbulence: turbulence onset (TO) and slope (TS) around
//! ventricular premature complexes, averaged over valid episodes.

use crate::ingest::{BeatLabel, RRSeries};
use crate::util::regression_slope;

/// Post-pause sinus intervals required for a slope-valid episode.
const TS_POST_INTERVALS: usize = 15;
/// Regression window length for the slope search.
const TS_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy)]
pub struct TurbulenceIndexes {
    /// All ventricular-labeled beats, valid or not.
    pub vpc_count: usize,
    /// Mean TO (%) over valid episodes; absent when none qualify.
    pub turbulence_onset_pct: Option<f64>,
    /// Mean TS (ms/beat) over slope-valid episodes; absent when none qualify.
    pub turbulence_slope_ms_per_beat: Option<f64>,
    pub valid_vpc_episodes: usize,
}

/// Scan a labeled RR series for VPC episodes and average TO/TS over the valid
/// ones.
///
/// With beats carrying forward intervals, a ventricular beat at index k has
/// coupling interval rr[k-1], compensatory pause rr[k], preceding sinus
/// intervals rr[k-3], rr[k-2], and post-pause sinus intervals rr[k+1], ...
/// An episode is valid when the coupling is <= 80% and the pause >= 120% of
/// the mean preceding sinus interval, the three beats before the VPC and the
/// three after the pause are Normal (giving two sinus intervals on each
/// side); TS additionally needs 15 Normal post-pause intervals.
pub fn turbulence(series: &RRSeries) -> TurbulenceIndexes {
    let beats = &series.beats;
    let n = beats.len();
    let vpc_count = beats
        .iter()
        .filter(|b| b.label == BeatLabel::Ventricular)
        .count();

    let normal_run = |from: usize, count: usize| -> bool {
        from + count <= n
            && beats[from..from + count]
                .iter()
                .all(|b| b.label == BeatLabel::Normal)
    };

    let mut onsets = Vec::new();
    let mut slopes = Vec::new();
    let mut valid = 0usize;

    for k in 0..n {
        if beats[k].label != BeatLabel::Ventricular {
            continue;
        }
        // Two preceding sinus intervals rr[k-3], rr[k-2] and two post-pause
        // sinus intervals rr[k+1], rr[k+2].
        if k < 3 || !normal_run(k - 3, 3) || !normal_run(k + 1, 3) {
            continue;
        }
        let pre2 = beats[k - 3].rr_ms;
        let pre1 = beats[k - 2].rr_ms;
        let sinus_ref = 0.5 * (pre2 + pre1);
        let coupling = beats[k - 1].rr_ms;
        let pause = beats[k].rr_ms;
        if coupling > 0.8 * sinus_ref || pause < 1.2 * sinus_ref {
            continue;
        }
        valid += 1;
        let post1 = beats[k + 1].rr_ms;
        let post2 = beats[k + 2].rr_ms;
        onsets.push(100.0 * ((post1 + post2) - (pre2 + pre1)) / (pre2 + pre1));

        // TS needs the first 15 post-pause intervals, i.e. 16 Normal beats.
        if normal_run(k + 1, TS_POST_INTERVALS + 1) {
            let post: Vec<f64> = (1..=TS_POST_INTERVALS)
                .map(|j| beats[k + j].rr_ms)
                .collect();
            let xs: Vec<f64> = (0..TS_WINDOW).map(|i| i as f64).collect();
            let best = post
                .windows(TS_WINDOW)
                .map(|w| regression_slope(&xs, w))
                .max_by(f64::total_cmp)
                .unwrap();
            slopes.push(best);
        }
    }

    let average = |v: &[f64]| {
        if v.is_empty() {
            None
        } else {
            Some(v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    TurbulenceIndexes {
        vpc_count,
        turbulence_onset_pct: average(&onsets),
        turbulence_slope_ms_per_beat: average(&slopes),
        valid_vpc_episodes: valid,
    }
}
