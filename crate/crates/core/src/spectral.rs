//! Frequency-domain HRV indexes via Welch-averaged FFT periodograms.
//!
//! The NN tachogram (interval value against the terminating beat's cumulative
//! time) is cubic-spline resampled to a uniform rate, then Welch-averaged over
//! Hann-windowed, linearly detrended, 50%-overlapping windows. Band powers are
//! rectangle-rule integrals of the one-sided PSD.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use serde::{Deserialize, Serialize};

use crate::ingest::NNSeries;
use crate::{HrvError, Result};

/// Knot spacing beyond this is treated as a recording gap (dropped beats or a
/// spliced segment); Welch windows overlapping a gap are skipped rather than
/// letting the spline bridge hours of missing data with near-zero power.
pub const GAP_THRESHOLD_MS: f64 = 5_000.0;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    pub resample_hz: f64,
    pub window_s: f64,
    pub overlap_fraction: f64,
    pub vlf_band_hz: (f64, f64),
    pub lf_band_hz: (f64, f64),
    pub hf_band_hz: (f64, f64),
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            resample_hz: 4.0,
            window_s: 300.0,
            overlap_fraction: 0.5,
            vlf_band_hz: (0.0033, 0.04),
            lf_band_hz: (0.04, 0.15),
            hf_band_hz: (0.15, 0.40),
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        let bands = [self.vlf_band_hz, self.lf_band_hz, self.hf_band_hz];
        for (lo, hi) in bands {
            if !(lo >= 0.0 && lo < hi) {
                return Err(HrvError::Config("spectral bands must be ascending".into()));
            }
        }
        if self.vlf_band_hz.1 > self.lf_band_hz.0 || self.lf_band_hz.1 > self.hf_band_hz.0 {
            return Err(HrvError::Config("spectral bands must not overlap".into()));
        }
        if self.resample_hz <= 2.0 * self.hf_band_hz.1 {
            return Err(HrvError::Config(
                "resample rate must exceed twice the HF edge".into(),
            ));
        }
        if !(self.overlap_fraction >= 0.0 && self.overlap_fraction < 1.0) {
            return Err(HrvError::Config(
                "overlap fraction must be in [0, 1)".into(),
            ));
        }
        if self.window_s <= 0.0 {
            return Err(HrvError::Config("window length must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FrequencyDomainIndexes {
    pub total_power_ms2: f64,
    pub vlf_ms2: f64,
    pub lf_ms2: f64,
    pub hf_ms2: f64,
    /// 100 * lf / (lf + hf); absent when lf + hf == 0.
    pub lf_nu: Option<f64>,
    /// 100 - lf_nu, so the pair sums to 100 exactly.
    pub hf_nu: Option<f64>,
    /// lf / hf; absent when hf == 0.
    pub lf_hf_ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct UniformSeries {
    pub fs_hz: f64,
    /// Time of the first sample, milliseconds on the recording clock.
    pub start_ms: f64,
    pub values: Vec<f64>,
}

/// Natural cubic spline through strictly increasing knots.
pub struct CubicSpline {
    ts: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots (natural: zero at both ends).
    m2: Vec<f64>,
}

impl CubicSpline {
    pub fn fit(ts: &[f64], ys: &[f64]) -> CubicSpline {
        assert_eq!(ts.len(), ys.len());
        let n = ts.len();
        assert!(n >= 2, "spline needs at least two knots");
        let mut m2 = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior tridiagonal system.
            let k = n - 2;
            let mut sub = vec![0.0; k];
            let mut diag = vec![0.0; k];
            let mut sup = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                let h0 = ts[i + 1] - ts[i];
                let h1 = ts[i + 2] - ts[i + 1];
                sub[i] = h0;
                diag[i] = 2.0 * (h0 + h1);
                sup[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..k {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m2[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m2[i + 1] = (rhs[i] - sup[i] * m2[i + 2]) / diag[i];
            }
        }
        CubicSpline {
            ts: ts.to_vec(),
            ys: ys.to_vec(),
            m2,
        }
    }

    /// Evaluate at ascending query points (clamped to the knot range).
    pub fn eval_sorted(&self, queries: impl Iterator<Item = f64>) -> Vec<f64> {
        let n = self.ts.len();
        let mut seg = 0usize;
        let mut out = Vec::new();
        for q in queries {
            let t = q.clamp(self.ts[0], self.ts[n - 1]);
            while seg + 2 < n && t > self.ts[seg + 1] {
                seg += 1;
            }
            let h = self.ts[seg + 1] - self.ts[seg];
            let a = (self.ts[seg + 1] - t) / h;
            let b = (t - self.ts[seg]) / h;
            let y = a * self.ys[seg]
                + b * self.ys[seg + 1]
                + ((a * a * a - a) * self.m2[seg] + (b * b * b - b) * self.m2[seg + 1]) * h * h
                    / 6.0;
            out.push(y);
        }
        out
    }
}

/// Tachogram knots: (terminating-beat time, interval value).
fn tachogram_knots(nn: &NNSeries) -> (Vec<f64>, Vec<f64>) {
    let ts = nn
        .onset_ms
        .iter()
        .zip(&nn.intervals_ms)
        .map(|(&o, &rr)| o + rr)
        .collect();
    (ts, nn.intervals_ms.clone())
}

/// Cubic-spline resample of the NN tachogram at `cfg.resample_hz`.
pub fn resample_tachogram(nn: &NNSeries, cfg: &SpectralConfig) -> Result<UniformSeries> {
    let (ts, ys) = tachogram_knots(nn);
    if ts.len() < 4 {
        return Err(HrvError::SpanTooShort);
    }
    let span_ms = ts[ts.len() - 1] - ts[0];
    if span_ms < cfg.window_s * 1000.0 {
        return Err(HrvError::SpanTooShort);
    }
    let dt_ms = 1000.0 / cfg.resample_hz;
    let count = (span_ms / dt_ms).floor() as usize + 1;
    let spline = CubicSpline::fit(&ts, &ys);
    let values = spline.eval_sorted((0..count).map(|j| ts[0] + j as f64 * dt_ms));
    Ok(UniformSeries {
        fs_hz: cfg.resample_hz,
        start_ms: ts[0],
        values,
    })
}

#[derive(Debug, Clone)]
pub struct Psd {
    pub df_hz: f64,
    /// One-sided PSD values at k * df_hz, units ms^2/Hz.
    pub values: Vec<f64>,
}

impl Psd {
    /// Rectangle-rule integral over [lo, hi).
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &p)| (k as f64 * self.df_hz, p))
            .filter(|&(f, _)| f >= lo && f < hi)
            .map(|(_, p)| p * self.df_hz)
            .sum()
    }
}

fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos()))
        .collect()
}

fn detrend_in_place(y: &mut [f64]) {
    let n = y.len() as f64;
    let mid = (n - 1.0) / 2.0;
    let mean = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, &v) in y.iter().enumerate() {
        let x = i as f64 - mid;
        sxy += x * (v - mean);
        sxx += x * x;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    for (i, v) in y.iter_mut().enumerate() {
        *v -= mean + slope * (i as f64 - mid);
    }
}

/// Welch-averaged one-sided PSD. Windows whose time spans overlap any of the
/// supplied gap ranges are skipped.
pub fn welch_psd(series: &UniformSeries, cfg: &SpectralConfig, gaps: &[(f64, f64)]) -> Result<Psd> {
    let fs = series.fs_hz;
    let win_len = (cfg.window_s * fs).round() as usize;
    let n = series.values.len();
    if win_len < 4 || n < win_len {
        return Err(HrvError::SpanTooShort);
    }
    let hop = ((win_len as f64 * (1.0 - cfg.overlap_fraction)).round() as usize).max(1);
    let nfft = win_len.next_power_of_two();
    let window = hann(win_len);
    let sum_w2: f64 = window.iter().map(|w| w * w).sum();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(nfft);
    let mut accum = vec![0.0f64; nfft / 2 + 1];
    let mut kept = 0usize;
    let dt_ms = 1000.0 / fs;

    let mut start = 0usize;
    while start + win_len <= n {
        let t0 = series.start_ms + start as f64 * dt_ms;
        let t1 = series.start_ms + (start + win_len - 1) as f64 * dt_ms;
        if !gaps.iter().any(|&(g0, g1)| g0 < t1 && g1 > t0) {
            let mut seg: Vec<f64> = series.values[start..start + win_len].to_vec();
            detrend_in_place(&mut seg);
            let mut buf: Vec<Complex<f64>> = seg
                .iter()
                .zip(&window)
                .map(|(&v, &w)| Complex::new(v * w, 0.0))
                .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
                .take(nfft)
                .collect();
            fft.process(&mut buf);
            for (k, slot) in accum.iter_mut().enumerate() {
                *slot += buf[k].norm_sqr();
            }
            kept += 1;
        }
        start += hop;
    }
    if kept == 0 {
        return Err(HrvError::SpanTooShort);
    }

    let scale = 1.0 / (kept as f64 * fs * sum_w2);
    let values: Vec<f64> = accum
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let one_sided = if k == 0 || k == nfft / 2 { 1.0 } else { 2.0 };
            a * scale * one_sided
        })
        .collect();
    Ok(Psd {
        df_hz: fs / nfft as f64,
        values,
    })
}

fn knot_gaps(nn: &NNSeries) -> Vec<(f64, f64)> {
    let (ts, _) = tachogram_knots(nn);
    ts.windows(2)
        .filter(|p| p[1] - p[0] > GAP_THRESHOLD_MS)
        .map(|p| (p[0], p[1]))
        .collect()
}

/// Full frequency-domain panel over the configured bands.
pub fn band_powers(nn: &NNSeries, cfg: &SpectralConfig) -> Result<FrequencyDomainIndexes> {
    let uniform = resample_tachogram(nn, cfg)?;
    let psd = welch_psd(&uniform, cfg, &knot_gaps(nn))?;

    let vlf = psd.band_power(cfg.vlf_band_hz.0, cfg.vlf_band_hz.1);
    let lf = psd.band_power(cfg.lf_band_hz.0, cfg.lf_band_hz.1);
    let hf = psd.band_power(cfg.hf_band_hz.0, cfg.hf_band_hz.1);
    let total = psd.band_power(cfg.vlf_band_hz.0, cfg.hf_band_hz.1);

    let lf_nu = if lf + hf > 0.0 {
        Some(100.0 * lf / (lf + hf))
    } else {
        None
    };
    let hf_nu = lf_nu.map(|v| 100.0 - v);
    let lf_hf_ratio = if hf > 0.0 { Some(lf / hf) } else { None };

    Ok(FrequencyDomainIndexes {
        total_power_ms2: total,
        vlf_ms2: vlf,
        lf_ms2: lf,
        hf_ms2: hf,
        lf_nu,
        hf_nu,
        lf_hf_ratio,
    })
}
