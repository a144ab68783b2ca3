//! Acceptance gate: one test per release criterion, each printing a single
//! PASS/FAIL line with its pinned tolerance. Oracles are stated independently
//! of the library implementation wherever a criterion demands a cross-check.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hrvbench::eval::{
    benchmark_feature_sets, cross_validate, kappa, roc_auroc, ConfusionMatrix, EvalProtocol,
};
use hrvbench::features::{
    extract_recording, to_feature_matrix, ExtractConfig, FeatureRow, FeatureSet, ALL_FEATURE_SETS,
    FEATURE_COLUMNS,
};
use hrvbench::ingest::{Beat, BeatLabel, NNSeries, RRSeries, Segment};
use hrvbench::lyapunov::{lyapunov_series, LyapunovConfig};
use hrvbench::ml::{train, FeatureMatrix, ModelFamily, ModelSpec, ALL_FAMILIES};
use hrvbench::poincare::poincare;
use hrvbench::prsa::{prsa_series, AnchorRule};
use hrvbench::spectral::{band_powers, SpectralConfig};
use hrvbench::stats::group_stats;
use hrvbench::synth::{generate_cohort, CohortParams};
use hrvbench::turbulence::turbulence;
use hrvbench::util::mix_seed;

fn check(criterion: &str, pass: bool, detail: String) {
    println!(
        "{}: {criterion} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

fn nn_series(intervals: &[f64]) -> NNSeries {
    let mut onset = 0.0;
    let onsets = intervals
        .iter()
        .map(|&rr| {
            let o = onset;
            onset += rr;
            o
        })
        .collect();
    NNSeries {
        recording_id: "acceptance".into(),
        start_clock_s: 0,
        segment: Segment::Full24h,
        intervals_ms: intervals.to_vec(),
        onset_ms: onsets,
    }
}

fn pop_var(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / xs.len() as f64
}

#[test]
fn c01_poincare_analytic_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(3..=10_000);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(300.0..2000.0)).collect();
        let p = poincare(&nn_series(&x)).unwrap();
        let d: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let sd1_oracle = (pop_var(&d) / 2.0).sqrt();
        let sum_oracle = pop_var(&x[..n - 1]) + pop_var(&x[1..]);
        let e1 = ((p.sd1_ms - sd1_oracle) / sd1_oracle).abs();
        let sum = p.sd1_ms * p.sd1_ms + p.sd2_ms * p.sd2_ms;
        let e2 = ((sum - sum_oracle) / sum_oracle).abs();
        worst = worst.max(e1).max(e2);
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        "analytic identities: SD1 = population-RMSSD/sqrt(2) and sd1^2+sd2^2 = \
         lag-pair member variances, 1000 series, rel err <= 1e-9, < 10 s",
        worst <= 1e-9 && secs < 10.0,
        format!("worst rel err {worst:.2e}, {secs:.1} s"),
    );
}

#[test]
fn c02_parseval_total_power() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let cfg = SpectralConfig::default();
    let tau = std::f64::consts::TAU;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        // 20-35 min tachogram: smooth in-band tones plus small beat noise.
        let duration_ms = rng.random_range(1_200_000.0..2_100_000.0);
        let mean_rr: f64 = rng.random_range(650.0..850.0);
        let tones: Vec<(f64, f64, f64)> = (0..5)
            .map(|i| {
                let amp = if i < 3 {
                    rng.random_range(10.0..30.0)
                } else {
                    rng.random_range(2.0..5.0)
                };
                (
                    amp,
                    rng.random_range(0.01..0.28),
                    rng.random_range(0.0..tau),
                )
            })
            .collect();
        let tone_at = |t_ms: f64| -> f64 {
            let s = t_ms / 1000.0;
            mean_rr
                + tones
                    .iter()
                    .map(|&(a, f, ph)| a * (tau * f * s + ph).sin())
                    .sum::<f64>()
        };
        let mut t = 0.0;
        let mut intervals = Vec::new();
        let mut onsets = Vec::new();
        while t < duration_ms {
            let v = tone_at(t) + rng.random_range(-2.0..2.0);
            intervals.push(v);
            onsets.push(t);
            t += v;
        }
        let nn = NNSeries {
            recording_id: "parseval".into(),
            start_clock_s: 0,
            segment: Segment::Full24h,
            intervals_ms: intervals.clone(),
            onset_ms: onsets.clone(),
        };
        let fd = band_powers(&nn, &cfg).unwrap();
        // Independent oracle: sample the generating function itself on the
        // resample grid spanning the tachogram knots and take its variance.
        let t0 = onsets[0] + intervals[0];
        let t1 = onsets[intervals.len() - 1] + intervals[intervals.len() - 1];
        let dt = 1000.0 / cfg.resample_hz;
        let mut samples = Vec::new();
        let mut tt = t0;
        while tt <= t1 {
            samples.push(tone_at(tt));
            tt += dt;
        }
        let var = pop_var(&samples);
        let rel = ((fd.total_power_ms2 - var) / var).abs();
        worst = worst.max(rel);
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        "Parseval: total_power within 5% of detrended resampled variance, \
         100 tachograms >= 20 min, < 60 s",
        worst <= 0.05 && secs < 60.0,
        format!("worst rel dev {worst:.3}, {secs:.1} s"),
    );
}

#[test]
fn c03_metric_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut kappa_exact = true;
    for _ in 0..10_000 {
        let cm = ConfusionMatrix {
            tp: rng.random_range(0..50),
            fn_: rng.random_range(0..50),
            fp: rng.random_range(0..50),
            tn: rng.random_range(0..50),
        };
        if cm.total() == 0 {
            continue;
        }
        // Direct formula: kappa = (p_o - p_e) / (1 - p_e).
        let n = cm.total() as f64;
        let (tp, fn_, fp, tn) = (cm.tp as f64, cm.fn_ as f64, cm.fp as f64, cm.tn as f64);
        let p_o = (tp + tn) / n;
        let p_e = ((tp + fn_) * (tp + fp) + (fp + tn) * (fn_ + tn)) / (n * n);
        let oracle = if p_e == 1.0 {
            None
        } else {
            Some((p_o - p_e) / (1.0 - p_e))
        };
        kappa_exact &= kappa(&cm) == oracle;
    }

    let mut auroc_worst = 0.0f64;
    let mut tested = 0usize;
    while tested < 1000 {
        let n = rng.random_range(2..160);
        let labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2) as u8).collect();
        let n_pos = labels.iter().filter(|&&l| l == 1).count();
        if n_pos == 0 || n_pos == n {
            continue;
        }
        tested += 1;
        // Coarse score grid guarantees plenty of exact ties.
        let scores: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..9) as f64 / 8.0)
            .collect();
        let (_, auroc) = roc_auroc(&labels, &scores).unwrap();
        let mut u = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if labels[i] == 1 && labels[j] == 0 {
                    u += if scores[i] > scores[j] {
                        1.0
                    } else if scores[i] == scores[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        let mw = u / (n_pos as f64 * (n - n_pos) as f64);
        auroc_worst = auroc_worst.max((auroc - mw).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        "metric oracles: kappa exact on 10,000 confusion matrices; AUROC vs \
         tie-adjusted Mann-Whitney <= 1e-12 on 1000 score sets, < 30 s",
        kappa_exact && auroc_worst <= 1e-12 && secs < 30.0,
        format!("kappa exact {kappa_exact}, auroc dev {auroc_worst:.2e}, {secs:.1} s"),
    );
}

#[test]
fn c04_knn_brute_force_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut exact = true;
    for set in 0..200u64 {
        let n = rng.random_range(4..80);
        let dims = rng.random_range(1..5);
        let k = rng.random_range(1..=10usize);
        // Integer grid features force plenty of exact distance ties.
        let mut col =
            |_: usize| -> Vec<f64> { (0..dims).map(|_| rng.random_range(0..4) as f64).collect() };
        let values: Vec<Vec<f64>> = (0..n).map(&mut col).collect();
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2) as u8).collect();
        // The trainer requires at least two rows per class.
        labels[..4].copy_from_slice(&[0, 0, 1, 1]);
        let data = FeatureMatrix {
            row_ids: (0..n).map(|i| format!("r{i}")).collect(),
            feature_names: (0..dims).map(|d| format!("f{d}")).collect(),
            values: values.clone(),
            labels: labels.clone(),
        };
        let mut spec = ModelSpec::new(ModelFamily::KNearestNeighbor, set);
        spec.hyper.knn_k = k;
        let model = train(&spec, &data).unwrap();

        // Standardization oracle: per-feature mean and population sd (0 -> 1).
        let nf = n as f64;
        let means: Vec<f64> = (0..dims)
            .map(|d| values.iter().map(|r| r[d]).sum::<f64>() / nf)
            .collect();
        let sds: Vec<f64> = (0..dims)
            .map(|d| {
                let s = (values
                    .iter()
                    .map(|r| (r[d] - means[d]) * (r[d] - means[d]))
                    .sum::<f64>()
                    / nf)
                    .sqrt();
                if s == 0.0 {
                    1.0
                } else {
                    s
                }
            })
            .collect();
        let standardize = |row: &[f64]| -> Vec<f64> {
            row.iter()
                .zip(&means)
                .zip(&sds)
                .map(|((v, m), s)| (v - m) / s)
                .collect()
        };
        let z_train: Vec<Vec<f64>> = values.iter().map(|r| standardize(r)).collect();

        for _ in 0..15 {
            let query: Vec<f64> = (0..dims).map(|_| rng.random_range(0..4) as f64).collect();
            let zq = standardize(&query);
            // Brute force: sort all (squared distance, index), credit rows
            // strictly inside the k-th distance fully and split the remaining
            // slots evenly across boundary ties.
            let mut dists: Vec<(f64, usize)> = z_train
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    (
                        r.iter()
                            .zip(&zq)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>(),
                        i,
                    )
                })
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let k_eff = k.min(n);
            let boundary = dists[k_eff - 1].0;
            let (mut inner, mut inner_mi, mut tied, mut tied_mi) = (0usize, 0usize, 0usize, 0usize);
            for &(d2, i) in &dists {
                if d2 < boundary {
                    inner += 1;
                    inner_mi += labels[i] as usize;
                } else if d2 == boundary {
                    tied += 1;
                    tied_mi += labels[i] as usize;
                } else {
                    break;
                }
            }
            let share = (k_eff - inner) as f64 / tied as f64;
            let oracle = (inner_mi as f64 + share * tied_mi as f64) / k_eff as f64;
            let got = model.score(&query).unwrap();
            exact &= got == oracle;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        "kNN equals brute-force all-pairs oracle on 200 train/query sets, \
         exact score agreement, < 30 s",
        exact && secs < 30.0,
        format!("exact {exact}, {secs:.1} s"),
    );
}

#[test]
fn c05_turbulence_and_prsa_hand_cases() {
    // Scripted episode: sinus 800 ms, coupling 600, pause 1000, then the
    // 15-beat post sequence.
    let mut spec = vec![(800.0, BeatLabel::Normal); 5];
    spec.push((600.0, BeatLabel::Normal));
    spec.push((1000.0, BeatLabel::Ventricular));
    for rr in [780.0, 790.0, 800.0, 805.0, 810.0] {
        spec.push((rr, BeatLabel::Normal));
    }
    spec.extend(vec![(800.0, BeatLabel::Normal); 11]);
    let mut onset = 0.0;
    let beats = spec
        .iter()
        .map(|&(rr, label)| {
            let b = Beat {
                onset_ms: onset,
                rr_ms: rr,
                label,
            };
            onset += rr;
            b
        })
        .collect();
    let series = RRSeries {
        recording_id: "hrt".into(),
        start_clock_s: 0,
        beats,
    };
    let t = turbulence(&series);
    let to_ok = t.turbulence_onset_pct == Some(-1.875);
    let ts_ok = t.turbulence_slope_ms_per_beat == Some(7.5);

    // PRSA hand cases.
    let ramp: Vec<f64> = (0..60).map(|i| 700.0 + 10.0 * i as f64).collect();
    let ramp_dc = prsa_series(&ramp, 2, AnchorRule::Deceleration)
        .unwrap()
        .capacity_ms;
    let alt: Vec<f64> = (0..80)
        .map(|i| if i % 2 == 0 { 800.0 } else { 820.0 })
        .collect();
    let alt_dc = prsa_series(&alt, 2, AnchorRule::Deceleration)
        .unwrap()
        .capacity_ms;

    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(30..500);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(600.0..1000.0)).collect();
        let reversed: Vec<f64> = x.iter().rev().copied().collect();
        let dc = prsa_series(&x, 2, AnchorRule::Deceleration)
            .unwrap()
            .capacity_ms;
        let ac_rev = prsa_series(&reversed, 2, AnchorRule::Acceleration)
            .unwrap()
            .capacity_ms;
        worst = worst.max((dc + ac_rev).abs());
    }
    check(
        "HRT hand case TO = -1.875%, TS = 7.5 ms/beat exactly; PRSA ramp DC = step, \
         alternation DC = 0, DC = -AC(reversed) <= 1e-9 on 100 series",
        to_ok && ts_ok && ramp_dc == 10.0 && alt_dc == 0.0 && worst <= 1e-9,
        format!(
            "TO {:?}, TS {:?}, ramp DC {ramp_dc}, alternation DC {alt_dc}, \
             reversal dev {worst:.2e}",
            t.turbulence_onset_pct, t.turbulence_slope_ms_per_beat
        ),
    );
}

#[test]
fn c06_lyapunov_sanity() {
    let start = Instant::now();
    let mut v = 0.31f64;
    let logistic: Vec<f64> = (0..5000)
        .map(|_| {
            v = 4.0 * v * (1.0 - v);
            600.0 + 400.0 * v
        })
        .collect();
    let cfg_log = LyapunovConfig {
        fit_range_steps: (0, 5),
        ..LyapunovConfig::default()
    };
    let lle_log = lyapunov_series(&logistic, &cfg_log).unwrap();

    let pattern = [800.0, 760.0, 820.0, 790.0, 840.0, 770.0, 810.0];
    let periodic: Vec<f64> = (0..2000).map(|i| pattern[i % 7]).collect();
    let cfg = LyapunovConfig::default();
    let lle_periodic = lyapunov_series(&periodic, &cfg).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let noise: Vec<f64> = (0..2000).map(|_| rng.random_range(600.0..1000.0)).collect();
    let lle_noise = lyapunov_series(&noise, &cfg).unwrap();

    let secs = start.elapsed().as_secs_f64();
    check(
        "Lyapunov sanity: logistic map 0.693 +/- 0.15, periodic <= 0.01, \
         noise > periodic, < 2 min",
        (lle_log - std::f64::consts::LN_2).abs() <= 0.15
            && lle_periodic.abs() <= 0.01
            && lle_noise > lle_periodic
            && secs < 120.0,
        format!(
            "logistic {lle_log:.3}, periodic {lle_periodic:.4}, noise {lle_noise:.3}, {secs:.1} s"
        ),
    );
}

/// Default cohort (seed 42, 128 healthy / 90 MI) extracted to the 24h feature
/// matrix; shared by the benchmark-grid and null-control criteria.
fn cohort_features() -> &'static FeatureMatrix {
    static FEATURES: OnceLock<FeatureMatrix> = OnceLock::new();
    FEATURES.get_or_init(|| {
        let cohort = generate_cohort(&CohortParams::default()).expect("cohort");
        let cfg = ExtractConfig::default();
        let rows: Vec<FeatureRow> = cohort
            .par_iter()
            .flat_map(|(series, label)| {
                let mut rows = extract_recording(series, &cfg).expect("extract");
                for row in &mut rows {
                    row.label = label.as_str().to_string();
                }
                rows
            })
            .collect();
        to_feature_matrix(&rows, Segment::Full24h, &FEATURE_COLUMNS).expect("matrix")
    })
}

#[test]
fn c07_benchmark_grid_reproduction() {
    let start = Instant::now();
    let features = cohort_features();
    let protocol = EvalProtocol::default();
    let specs: Vec<ModelSpec> = ALL_FAMILIES
        .iter()
        .enumerate()
        .map(|(i, &family)| {
            ModelSpec::new(
                family,
                mix_seed(protocol.split_seed, 0x4d4f_4445 + i as u64),
            )
        })
        .collect();
    let report = benchmark_feature_sets(features, &ALL_FEATURE_SETS, &specs, &protocol).unwrap();

    let populated = report.cells.iter().all(|cell| {
        for block in [&cell.cv.pooled, &cell.holdout] {
            if !(block.accuracy.is_finite()
                && block.kappa.is_some()
                && block.auroc.is_some()
                && block.sensitivity.is_some()
                && block.specificity.is_some())
            {
                return false;
            }
        }
        !cell.roc.is_empty()
    });
    let sd12nu_sgb = report
        .cell(
            FeatureSet::Sd1nuSd2nu,
            ModelFamily::StochasticGradientBoosting,
        )
        .and_then(|c| c.holdout.auroc)
        .unwrap_or(f64::NAN);
    let turbulence_sgb = report
        .cell(
            FeatureSet::TurbulenceIndexes,
            ModelFamily::StochasticGradientBoosting,
        )
        .and_then(|c| c.holdout.auroc)
        .unwrap_or(f64::NAN);
    let secs = start.elapsed().as_secs_f64();
    check(
        "benchmark grid: default cohort bench < 10 min, 5x8 cells populated, \
         sd12nu SGB held-out AUROC >= 0.90 and >= turbulence SGB AUROC",
        report.cells.len() == 40
            && populated
            && sd12nu_sgb >= 0.90
            && sd12nu_sgb >= turbulence_sgb
            && secs < 600.0,
        format!(
            "cells {}, populated {populated}, sd12nu SGB {sd12nu_sgb:.3}, \
             turbulence SGB {turbulence_sgb:.3}, {secs:.0} s",
            report.cells.len()
        ),
    );
}

#[test]
fn c08_null_control_permuted_labels() {
    let features = cohort_features();
    let names: Vec<String> = FeatureSet::Sd1nuSd2nu
        .columns()
        .iter()
        .map(|c| c.to_string())
        .collect();
    let data = features.select_features(&names).unwrap();
    let mut all_ok = true;
    let mut details = Vec::new();
    for &family in &ALL_FAMILIES {
        let mut sum = 0.0;
        for trial in 0..20u64 {
            let mut permuted = data.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(4242, trial));
            permuted.labels.shuffle(&mut rng);
            let protocol = EvalProtocol {
                split_seed: mix_seed(9, trial),
                ..EvalProtocol::default()
            };
            let spec = ModelSpec::new(family, mix_seed(7, trial));
            let outcome = cross_validate(&spec, &permuted, &protocol).unwrap();
            sum += outcome.pooled.kappa.unwrap_or(0.0);
        }
        let mean = sum / 20.0;
        all_ok &= (-0.1..=0.1).contains(&mean);
        details.push(format!("{} {mean:+.3}", family.slug()));
    }
    check(
        "null control: 20 label permutations, every model's pooled CV kappa \
         mean in [-0.1, 0.1]",
        all_ok,
        details.join(", "),
    );
}

#[test]
fn c09_anova_hand_oracle() {
    // 2x3 balanced design, 3 replicates per cell at mean -2 / mean / mean +2.
    // Hand sums of squares: group 882, segment 1008, interaction 144, error 48
    // on 12 df -> F = 220.5 / 126 / 18.
    let cell_means = [10.0, 16.0, 22.0, 20.0, 26.0, 44.0];
    let mut rows = Vec::new();
    for (i, &m) in cell_means.iter().enumerate() {
        let label = if i < 3 { "healthy" } else { "mi" };
        let segment = [Segment::Full24h, Segment::Day, Segment::Night][i % 3];
        for (j, v) in [m - 2.0, m, m + 2.0].into_iter().enumerate() {
            let mut values = vec![None; FEATURE_COLUMNS.len()];
            values[0] = Some(v);
            rows.push(FeatureRow {
                recording_id: format!("r{i}{j}"),
                label: label.into(),
                segment,
                values,
            });
        }
    }
    let report = group_stats(&rows).unwrap();
    let stats = &report.indexes[0];
    let seg = stats.segment.unwrap();
    let inter = stats.interaction.unwrap();
    let f_ok = (stats.group.f - 220.5).abs() <= 1e-9
        && (seg.f - 126.0).abs() <= 1e-9
        && (inter.f - 18.0).abs() <= 1e-9;

    let mut identical = rows.clone();
    for row in &mut identical {
        row.values[0] = Some(5.0);
    }
    let null_report = group_stats(&identical).unwrap();
    let ns = &null_report.indexes[0];
    let p_ok = ns.group.p == 1.0
        && ns.segment.unwrap().p == 1.0
        && ns.interaction.unwrap().p == 1.0
        && ns.pairwise.iter().all(|t| t.p == 1.0);
    check(
        "ANOVA oracle: hand 2x3x3 F statistics within 1e-9; identical cells \
         give all p = 1",
        f_ok && p_ok,
        format!(
            "F ({:.6}, {:.6}, {:.6}), identical-cells p ok {p_ok}",
            stats.group.f, seg.f, inter.f
        ),
    );
}

fn run_cli(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_hrvbench"))
        .args(args)
        .output()
        .expect("spawn hrvbench");
    assert!(
        status.status.success(),
        "hrvbench {args:?}: {}",
        String::from_utf8_lossy(&status.stderr)
    );
}

fn collect_csv(dir: &Path, base: &Path, out: &mut Vec<PathBuf>) {
    for entry in std::fs::read_dir(dir).expect("read_dir") {
        let path = entry.expect("entry").path();
        if path.is_dir() {
            collect_csv(&path, base, out);
        } else if path.extension().is_some_and(|e| e == "csv") {
            out.push(path.strip_prefix(base).expect("prefix").to_path_buf());
        }
    }
}

#[test]
fn c10_pipeline_determinism() {
    let base = tempfile::tempdir().expect("tempdir");
    for run in ["a", "b"] {
        let cohort = base.path().join(run).join("cohort");
        let out = base.path().join(run).join("run");
        run_cli(&[
            "synth",
            "--healthy",
            "6",
            "--mi",
            "6",
            "--seed",
            "9",
            "--out",
            cohort.to_str().unwrap(),
        ]);
        run_cli(&[
            "extract",
            "--input",
            cohort.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        run_cli(&[
            "bench",
            "--input",
            out.join("features.csv").to_str().unwrap(),
            "--folds",
            "2",
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    let dir_a = base.path().join("a");
    let dir_b = base.path().join("b");
    let mut csv_a = Vec::new();
    let mut csv_b = Vec::new();
    collect_csv(&dir_a, &dir_a, &mut csv_a);
    collect_csv(&dir_b, &dir_b, &mut csv_b);
    csv_a.sort();
    csv_b.sort();
    let same_set = csv_a == csv_b && !csv_a.is_empty();
    let identical = same_set
        && csv_a.iter().all(|rel| {
            std::fs::read(dir_a.join(rel)).expect("read a")
                == std::fs::read(dir_b.join(rel)).expect("read b")
        });
    check(
        "determinism: two synth+extract+bench runs with identical seeds \
         produce byte-identical CSV outputs",
        identical,
        format!("{} csv files compared, identical {identical}", csv_a.len()),
    );
}
