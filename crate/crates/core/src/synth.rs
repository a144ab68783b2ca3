//! Synthetic 24h RR-recording cohorts: a phenomenological sinusoid+noise
//! generator with Poisson VPC insertion and scripted post-VPC turbulence, so
//! every index has analyzable ground truth and the benchmark runs without
//! restricted Holter data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::ingest::{Beat, BeatLabel, RRSeries};
use crate::util::mix_seed;
use crate::{HrvError, Result};

const DAY_MS: f64 = 86_400_000.0;
/// Circadian RR peak (longest intervals) sits near 03:00.
const CIRCADIAN_PEAK_S: f64 = 3.0 * 3600.0;
/// Beats to wait after a turbulence script before another VPC may fire.
const VPC_COOLDOWN_BEATS: usize = 20;
/// Per-subject amplitude multipliers are clamped to keep recordings inside
/// the NN filter's jump tolerance.
const SCALE_CLAMP: (f64, f64) = (0.65, 1.5);

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub mean_rr_ms: f64,
    /// Between-subject SD of the subject mean RR.
    pub mean_rr_sd_ms: f64,
    pub circadian_amplitude_ms: f64,
    /// 0.1 Hz LF tone amplitude.
    pub lf_mod_amplitude_ms: f64,
    /// 0.25 Hz HF tone amplitude.
    pub hf_mod_amplitude_ms: f64,
    pub broadband_noise_sd_ms: f64,
    pub vpc_rate_per_hour: f64,
    /// Coupling interval as a fraction of the local sinus mean; the
    /// compensatory pause is (2 - fraction) of it.
    pub vpc_prematurity_fraction: f64,
    /// Scripted post-VPC turbulence onset (percent, negative = early
    /// acceleration) and its between-subject SD.
    pub turbulence_onset_pct: f64,
    pub turbulence_onset_sd_pct: f64,
    /// Scripted turbulence slope (ms/beat) and its between-subject SD.
    pub turbulence_slope_ms_per_beat: f64,
    pub turbulence_slope_sd: f64,
    /// Log-normal sigma of per-subject multipliers applied independently to
    /// the circadian/LF/HF/noise amplitudes.
    pub subject_scale_sd: f64,
    /// Log-normal sigma of the per-subject VPC rate multiplier.
    pub vpc_rate_dispersion: f64,
}

impl GeneratorParams {
    /// Healthy-group defaults, calibrated so cohort index means land near the
    /// healthy column of the reference index panel (SDNN ~155 ms, RMSSD
    /// ~39 ms, centroid ~790 ms, SD2nu ~27, a few VPCs per day).
    pub fn healthy_default() -> Self {
        GeneratorParams {
            mean_rr_ms: 790.0,
            mean_rr_sd_ms: 60.0,
            circadian_amplitude_ms: 210.0,
            lf_mod_amplitude_ms: 45.0,
            hf_mod_amplitude_ms: 35.0,
            broadband_noise_sd_ms: 15.0,
            vpc_rate_per_hour: 0.1,
            vpc_prematurity_fraction: 0.62,
            turbulence_onset_pct: -0.5,
            turbulence_onset_sd_pct: 0.8,
            turbulence_slope_ms_per_beat: 5.0,
            turbulence_slope_sd: 1.2,
            subject_scale_sd: 0.22,
            vpc_rate_dispersion: 1.5,
        }
    }

    /// Post-infarction defaults: slower overall rhythm, blunted circadian and
    /// short-term modulation, frequent VPCs, positive turbulence onset and a
    /// flatter slope.
    pub fn mi_default() -> Self {
        GeneratorParams {
            mean_rr_ms: 875.0,
            mean_rr_sd_ms: 70.0,
            circadian_amplitude_ms: 120.0,
            lf_mod_amplitude_ms: 22.0,
            hf_mod_amplitude_ms: 18.0,
            broadband_noise_sd_ms: 10.0,
            vpc_rate_per_hour: 0.85,
            vpc_prematurity_fraction: 0.62,
            turbulence_onset_pct: 0.4,
            turbulence_onset_sd_pct: 0.8,
            turbulence_slope_ms_per_beat: 4.0,
            turbulence_slope_sd: 1.2,
            subject_scale_sd: 0.25,
            vpc_rate_dispersion: 1.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let amplitudes = [
            self.circadian_amplitude_ms,
            self.lf_mod_amplitude_ms,
            self.hf_mod_amplitude_ms,
            self.broadband_noise_sd_ms,
            self.mean_rr_sd_ms,
            self.vpc_rate_per_hour,
            self.turbulence_onset_sd_pct,
            self.turbulence_slope_sd,
            self.subject_scale_sd,
            self.vpc_rate_dispersion,
        ];
        if amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(HrvError::Config("generator amplitudes must be >= 0".into()));
        }
        if !(500.0..=1200.0).contains(&self.mean_rr_ms) {
            return Err(HrvError::Config(
                "mean_rr_ms must be within [500, 1200]".into(),
            ));
        }
        if !(0.0 < self.vpc_prematurity_fraction && self.vpc_prematurity_fraction < 1.0) {
            return Err(HrvError::Config(
                "vpc_prematurity_fraction must be in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CohortParams {
    pub n_healthy: usize,
    pub n_mi: usize,
    pub seed: u64,
    pub healthy: GeneratorParams,
    pub mi: GeneratorParams,
}

impl Default for CohortParams {
    fn default() -> Self {
        CohortParams {
            n_healthy: 128,
            n_mi: 90,
            seed: 42,
            healthy: GeneratorParams::healthy_default(),
            mi: GeneratorParams::mi_default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupLabel {
    Healthy,
    Mi,
}

impl GroupLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupLabel::Healthy => "healthy",
            GroupLabel::Mi => "mi",
        }
    }

    pub fn parse(text: &str) -> Option<GroupLabel> {
        match text {
            "healthy" => Some(GroupLabel::Healthy),
            "mi" => Some(GroupLabel::Mi),
            _ => None,
        }
    }
}

/// Subject-level parameters resolved from the group distributions.
struct SubjectDraw {
    mean_rr: f64,
    circ_amp: f64,
    lf_amp: f64,
    hf_amp: f64,
    noise_sd: f64,
    vpc_rate: f64,
    to_pct: f64,
    ts_slope: f64,
    lf_phase: f64,
    hf_phase: f64,
    circ_shift_s: f64,
}

fn draw_subject(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> SubjectDraw {
    let normal =
        |rng: &mut ChaCha8Rng, mean: f64, sd: f64| Normal::new(mean, sd).unwrap().sample(rng);
    let scale = |rng: &mut ChaCha8Rng, sigma: f64| {
        LogNormal::new(0.0, sigma)
            .unwrap()
            .sample(rng)
            .clamp(SCALE_CLAMP.0, SCALE_CLAMP.1)
    };
    let mean_rr = normal(rng, params.mean_rr_ms, params.mean_rr_sd_ms).clamp(500.0, 1200.0);
    let circ_amp = params.circadian_amplitude_ms * scale(rng, params.subject_scale_sd);
    let lf_amp = params.lf_mod_amplitude_ms * scale(rng, params.subject_scale_sd);
    let hf_amp = params.hf_mod_amplitude_ms * scale(rng, params.subject_scale_sd);
    let noise_sd = params.broadband_noise_sd_ms * scale(rng, params.subject_scale_sd);
    let vpc_rate = params.vpc_rate_per_hour
        * LogNormal::new(0.0, params.vpc_rate_dispersion)
            .unwrap()
            .sample(rng);
    let to_pct = normal(
        rng,
        params.turbulence_onset_pct,
        params.turbulence_onset_sd_pct,
    );
    let ts_slope = normal(
        rng,
        params.turbulence_slope_ms_per_beat,
        params.turbulence_slope_sd,
    )
    .max(0.0);
    let tau = 2.0 * std::f64::consts::PI;
    SubjectDraw {
        mean_rr,
        circ_amp,
        lf_amp,
        hf_amp,
        noise_sd,
        vpc_rate,
        to_pct,
        ts_slope,
        lf_phase: rng.random_range(0.0..tau),
        hf_phase: rng.random_range(0.0..tau),
        circ_shift_s: rng.random_range(-3600.0..3600.0),
    }
}

/// Generate one 24h recording. Subject-level parameters are drawn from the
/// group distributions using `subject_seed`, so the output is a pure function
/// of `(params, subject_seed)`.
pub fn generate_recording(params: &GeneratorParams, subject_seed: u64) -> Result<RRSeries> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(subject_seed);
    let subject = draw_subject(params, &mut rng);
    let tau = 2.0 * std::f64::consts::PI;

    // A sinus interval for wall-clock time t (start of the interval).
    let sinus = |t_ms: f64, z: f64| -> f64 {
        let t_s = t_ms / 1000.0;
        let circadian = subject.circ_amp
            * (tau * (t_s - CIRCADIAN_PEAK_S - subject.circ_shift_s) / 86_400.0).cos();
        let lf = subject.lf_amp * (tau * 0.1 * t_s + subject.lf_phase).sin();
        let hf = subject.hf_amp * (tau * 0.25 * t_s + subject.hf_phase).sin();
        let raw = subject.mean_rr + circadian + lf + hf + subject.noise_sd * z;
        raw.round().clamp(300.0, 2000.0)
    };

    let p_vpc = subject.vpc_rate * subject.mean_rr / 3_600_000.0;
    let mut beats: Vec<Beat> = Vec::with_capacity((DAY_MS / subject.mean_rr) as usize + 64);
    let mut t = 0.0f64;
    let mut cooldown = 0usize;

    while t < DAY_MS {
        let z: f64 = rng.sample(rand_distr::StandardNormal);
        let u: f64 = rng.random();
        let fire = cooldown == 0 && beats.len() >= 2 && u < p_vpc;
        if !fire {
            let rr = sinus(t, z);
            beats.push(Beat {
                onset_ms: t,
                rr_ms: rr,
                label: BeatLabel::Normal,
            });
            t += rr;
            cooldown = cooldown.saturating_sub(1);
            continue;
        }

        // Scripted VPC episode: coupling beat, ventricular beat carrying the
        // compensatory pause, then 15 post-pause beats with the turbulence
        // ramp (onset offset on beats 1-2, slope climb on 3-8, linear decay
        // back to baseline on 9-15).
        let n = beats.len();
        let s_ref = 0.5 * (beats[n - 1].rr_ms + beats[n - 2].rr_ms);
        let coupling = (params.vpc_prematurity_fraction * s_ref)
            .round()
            .clamp(300.0, 2000.0);
        let pause = ((2.0 - params.vpc_prematurity_fraction) * s_ref)
            .round()
            .clamp(300.0, 2000.0);
        beats.push(Beat {
            onset_ms: t,
            rr_ms: coupling,
            label: BeatLabel::Normal,
        });
        t += coupling;
        beats.push(Beat {
            onset_ms: t,
            rr_ms: pause,
            label: BeatLabel::Ventricular,
        });
        t += pause;
        for j in 1..=15usize {
            let zj: f64 = rng.sample(rand_distr::StandardNormal);
            let base = sinus(t, zj);
            let onset_offset = base * subject.to_pct / 100.0;
            let offset = match j {
                1 | 2 => onset_offset,
                3..=8 => onset_offset + subject.ts_slope * (j as f64 - 2.0),
                _ => (onset_offset + 6.0 * subject.ts_slope) * (15.0 - j as f64) / 7.0,
            };
            let rr = (base + offset).round().clamp(300.0, 2000.0);
            beats.push(Beat {
                onset_ms: t,
                rr_ms: rr,
                label: BeatLabel::Normal,
            });
            t += rr;
        }
        cooldown = VPC_COOLDOWN_BEATS;
    }

    Ok(RRSeries {
        recording_id: format!("synth_{subject_seed:016x}"),
        start_clock_s: 0,
        beats,
    })
}

/// Generate the full labeled cohort; healthy subjects first, then MI.
/// Per-subject seeds derive from (cohort seed, group, index), so each group's
/// recordings are stable under changes to the other group's size.
pub fn generate_cohort(params: &CohortParams) -> Result<Vec<(RRSeries, GroupLabel)>> {
    params.healthy.validate()?;
    params.mi.validate()?;

    let jobs: Vec<(GroupLabel, usize, u64)> = (0..params.n_healthy)
        .map(|i| {
            (
                GroupLabel::Healthy,
                i,
                subject_seed(params.seed, GroupLabel::Healthy, i),
            )
        })
        .chain((0..params.n_mi).map(|i| {
            (
                GroupLabel::Mi,
                i,
                subject_seed(params.seed, GroupLabel::Mi, i),
            )
        }))
        .collect();

    jobs.into_par_iter()
        .map(|(label, index, seed)| {
            let group = match label {
                GroupLabel::Healthy => &params.healthy,
                GroupLabel::Mi => &params.mi,
            };
            let mut rec = generate_recording(group, seed)?;
            rec.recording_id = format!("{}_{:03}", label.as_str(), index + 1);
            Ok((rec, label))
        })
        .collect()
}

/// The per-subject generator seed, exposed so the manifest can record it.
pub fn subject_seed(cohort_seed: u64, label: GroupLabel, index: usize) -> u64 {
    let group_stream = match label {
        GroupLabel::Healthy => 1,
        GroupLabel::Mi => 2,
    };
    mix_seed(mix_seed(cohort_seed, group_stream), index as u64)
}
