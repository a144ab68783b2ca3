//! Feature extraction: turn one RR recording into per-segment index rows,
//! serialize them as the interchange CSV, and assemble labeled feature
//! matrices (with median imputation) for the classifier benchmark.

use serde::{Deserialize, Serialize};

use crate::ingest::{
    filter_to_nn, segment, FilterConfig, NNSeries, RRSeries, Segment, SegmentSpec,
};
use crate::lyapunov::{lyapunov, LyapunovConfig};
use crate::ml::FeatureMatrix;
use crate::poincare::poincare;
use crate::prsa::prsa_indexes;
use crate::spectral::{band_powers, SpectralConfig};
use crate::timedomain::time_domain;
use crate::turbulence::turbulence;
use crate::util::format_sig;
use crate::{HrvError, Result};

/// Index columns of the features CSV, in emission order.
pub const FEATURE_COLUMNS: [&str; 28] = [
    "mean_rr",
    "mean_hr",
    "pcnn20",
    "pcnn30",
    "pcnn50",
    "sdnn",
    "rmssd",
    "sdann",
    "sdnnidx",
    "total_power",
    "vlf",
    "lf",
    "hf",
    "lf_nu",
    "hf_nu",
    "lf_hf",
    "centroid",
    "sd1",
    "sd2",
    "sd1_sd2",
    "sd1_nu",
    "sd2_nu",
    "lle",
    "vpc_count",
    "to",
    "ts",
    "ac",
    "dc",
];

pub const FEATURES_HEADER: &str = "recording_id,label,segment,mean_rr,mean_hr,pcnn20,pcnn30,\
pcnn50,sdnn,rmssd,sdann,sdnnidx,total_power,vlf,lf,hf,lf_nu,hf_nu,lf_hf,centroid,sd1,sd2,\
sd1_sd2,sd1_nu,sd2_nu,lle,vpc_count,to,ts,ac,dc";

/// Column index within [`FEATURE_COLUMNS`].
pub fn column_index(name: &str) -> Option<usize> {
    FEATURE_COLUMNS.iter().position(|&c| c == name)
}

/// One (recording, segment) row of the features table. Absent indexes stay
/// `None` and serialize as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub recording_id: String,
    /// "healthy", "mi", or empty when unlabeled.
    pub label: String,
    pub segment: Segment,
    pub values: Vec<Option<f64>>,
}

impl FeatureRow {
    fn empty(recording_id: &str, segment: Segment) -> FeatureRow {
        FeatureRow {
            recording_id: recording_id.to_string(),
            label: String::new(),
            segment,
            values: vec![None; FEATURE_COLUMNS.len()],
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values[column_index(name).expect("known column")]
    }

    fn set(&mut self, name: &str, value: Option<f64>) {
        self.values[column_index(name).expect("known column")] = value;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    pub filter: FilterConfig,
    pub segments: SegmentSpec,
    pub spectral: SpectralConfig,
    pub lyapunov: LyapunovConfig,
    /// PRSA anchor window half-length.
    pub prsa_window: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            filter: FilterConfig::default(),
            segments: SegmentSpec::default(),
            spectral: SpectralConfig::default(),
            lyapunov: LyapunovConfig::default(),
            prsa_window: 2,
        }
    }
}

/// Fill the per-segment indexes computable from an NN series. Indexes whose
/// preconditions fail (too few intervals, span too short, no divergence
/// neighbors) are simply left absent.
fn fill_segment_indexes(row: &mut FeatureRow, nn: &NNSeries, cfg: &ExtractConfig) {
    if let Ok(td) = time_domain(nn) {
        row.set("mean_rr", Some(td.mean_rr_ms));
        row.set("mean_hr", Some(td.mean_hr_bpm));
        row.set("pcnn20", Some(td.pcnn20_pct));
        row.set("pcnn30", Some(td.pcnn30_pct));
        row.set("pcnn50", Some(td.pcnn50_pct));
        row.set("sdnn", Some(td.sdnn_ms));
        row.set("rmssd", Some(td.rmssd_ms));
        row.set("sdann", td.sdann_ms);
        row.set("sdnnidx", td.sdnnidx_ms);
    }
    if let Ok(fd) = band_powers(nn, &cfg.spectral) {
        row.set("total_power", Some(fd.total_power_ms2));
        row.set("vlf", Some(fd.vlf_ms2));
        row.set("lf", Some(fd.lf_ms2));
        row.set("hf", Some(fd.hf_ms2));
        row.set("lf_nu", fd.lf_nu);
        row.set("hf_nu", fd.hf_nu);
        row.set("lf_hf", fd.lf_hf_ratio);
    }
    if let Ok(pc) = poincare(nn) {
        row.set("centroid", Some(pc.centroid_ms));
        row.set("sd1", Some(pc.sd1_ms));
        row.set("sd2", Some(pc.sd2_ms));
        row.set("sd1_sd2", pc.sd1_sd2_ratio);
        row.set("sd1_nu", Some(pc.sd1_nu));
        row.set("sd2_nu", Some(pc.sd2_nu));
    }
    if let Ok(lle) = lyapunov(nn, &cfg.lyapunov) {
        row.set("lle", Some(lle));
    }
}

/// Extract the full index panel for one recording: one row per segment
/// (24h, day, night). Turbulence and PRSA capacities are whole-recording
/// indexes and appear only on the 24h row.
pub fn extract_recording(series: &RRSeries, cfg: &ExtractConfig) -> Result<Vec<FeatureRow>> {
    let nn = filter_to_nn(series, &cfg.filter)?;
    let segmented = segment(&nn, &cfg.segments);
    let mut rows = Vec::with_capacity(3);
    for nn_segment in [&segmented.full, &segmented.day, &segmented.night] {
        let mut row = FeatureRow::empty(&series.recording_id, nn_segment.segment);
        fill_segment_indexes(&mut row, nn_segment, cfg);
        if nn_segment.segment == Segment::Full24h {
            let hrt = turbulence(series);
            row.set("vpc_count", Some(hrt.vpc_count as f64));
            row.set("to", hrt.turbulence_onset_pct);
            row.set("ts", hrt.turbulence_slope_ms_per_beat);
            let prsa = prsa_indexes(&segmented.full, cfg.prsa_window);
            row.set("ac", prsa.acceleration_capacity_ms);
            row.set("dc", prsa.deceleration_capacity_ms);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_features_csv(rows: &[FeatureRow]) -> String {
    let mut out = String::from(FEATURES_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.recording_id);
        out.push(',');
        out.push_str(&row.label);
        out.push(',');
        out.push_str(row.segment.as_str());
        for value in &row.values {
            out.push(',');
            if let Some(v) = value {
                out.push_str(&format_sig(*v, 6));
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_features_csv(text: &str) -> Result<Vec<FeatureRow>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(HrvError::EmptyRecording)?;
    if header != FEATURES_HEADER {
        return Err(HrvError::Config(format!(
            "unexpected features header: {header}"
        )));
    }
    let mut rows = Vec::new();
    for (number, line) in lines.enumerate() {
        let line_no = number + 2;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != FEATURE_COLUMNS.len() + 3 {
            return Err(HrvError::Config(format!(
                "line {line_no}: expected {} fields, found {}",
                FEATURE_COLUMNS.len() + 3,
                fields.len()
            )));
        }
        let segment = match fields[2] {
            "24h" => Segment::Full24h,
            "day" => Segment::Day,
            "night" => Segment::Night,
            other => {
                return Err(HrvError::Config(format!(
                    "line {line_no}: unknown segment {other:?}"
                )))
            }
        };
        let mut values = Vec::with_capacity(FEATURE_COLUMNS.len());
        for (column, field) in FEATURE_COLUMNS.iter().zip(&fields[3..]) {
            if field.is_empty() {
                values.push(None);
            } else {
                let v: f64 = field.parse().map_err(|_| {
                    HrvError::Config(format!(
                        "line {line_no}: column {column} is not numeric: {field:?}"
                    ))
                })?;
                values.push(Some(v));
            }
        }
        rows.push(FeatureRow {
            recording_id: fields[0].to_string(),
            label: fields[1].to_string(),
            segment,
            values,
        });
    }
    Ok(rows)
}

/// The five benchmark feature sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSet {
    TimeDomain,
    FrequencyDomain,
    NonlinearDomain,
    TurbulenceIndexes,
    Sd1nuSd2nu,
}

pub const ALL_FEATURE_SETS: [FeatureSet; 5] = [
    FeatureSet::TimeDomain,
    FeatureSet::FrequencyDomain,
    FeatureSet::NonlinearDomain,
    FeatureSet::TurbulenceIndexes,
    FeatureSet::Sd1nuSd2nu,
];

impl FeatureSet {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureSet::TimeDomain => "time_domain",
            FeatureSet::FrequencyDomain => "frequency_domain",
            FeatureSet::NonlinearDomain => "nonlinear_domain",
            FeatureSet::TurbulenceIndexes => "turbulence_indexes",
            FeatureSet::Sd1nuSd2nu => "sd12nu",
        }
    }

    pub fn parse(text: &str) -> Option<FeatureSet> {
        match text.to_ascii_lowercase().as_str() {
            "time_domain" | "time" => Some(FeatureSet::TimeDomain),
            "frequency_domain" | "frequency" => Some(FeatureSet::FrequencyDomain),
            "nonlinear_domain" | "nonlinear" => Some(FeatureSet::NonlinearDomain),
            "turbulence_indexes" | "turbulence" => Some(FeatureSet::TurbulenceIndexes),
            "sd12nu" | "sd1nu_sd2nu" | "sd1nusd2nu" => Some(FeatureSet::Sd1nuSd2nu),
            _ => None,
        }
    }

    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            FeatureSet::TimeDomain => &[
                "mean_rr", "mean_hr", "pcnn20", "pcnn30", "pcnn50", "sdnn", "rmssd", "sdann",
                "sdnnidx",
            ],
            FeatureSet::FrequencyDomain => {
                &["total_power", "vlf", "lf", "hf", "lf_nu", "hf_nu", "lf_hf"]
            }
            FeatureSet::NonlinearDomain => &[
                "centroid", "sd1", "sd2", "sd1_sd2", "sd1_nu", "sd2_nu", "lle",
            ],
            FeatureSet::TurbulenceIndexes => &["vpc_count", "to", "ts", "ac", "dc"],
            FeatureSet::Sd1nuSd2nu => &["sd1_nu", "sd2_nu"],
        }
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Build a labeled feature matrix from one segment's rows, imputing absent
/// cells with the column median of the present values.
pub fn to_feature_matrix(
    rows: &[FeatureRow],
    segment: Segment,
    columns: &[&str],
) -> Result<FeatureMatrix> {
    let selected: Vec<&FeatureRow> = rows.iter().filter(|r| r.segment == segment).collect();
    if selected.is_empty() {
        return Err(HrvError::Config(format!(
            "no rows for segment {}",
            segment.as_str()
        )));
    }
    let mut labels = Vec::with_capacity(selected.len());
    for row in &selected {
        match row.label.as_str() {
            "healthy" => labels.push(0u8),
            "mi" => labels.push(1u8),
            other => {
                return Err(HrvError::Config(format!(
                    "recording {} has unusable label {other:?}",
                    row.recording_id
                )))
            }
        }
    }
    let column_indexes: Vec<usize> = columns
        .iter()
        .map(|name| {
            column_index(name)
                .ok_or_else(|| HrvError::Config(format!("unknown feature column {name:?}")))
        })
        .collect::<Result<_>>()?;

    let mut medians = Vec::with_capacity(column_indexes.len());
    for (&ci, name) in column_indexes.iter().zip(columns) {
        let mut present: Vec<f64> = selected.iter().filter_map(|r| r.values[ci]).collect();
        if present.is_empty() {
            return Err(HrvError::Config(format!(
                "feature column {name:?} has no values in segment {}",
                segment.as_str()
            )));
        }
        present.sort_by(f64::total_cmp);
        medians.push(median(&present));
    }

    let values: Vec<Vec<f64>> = selected
        .iter()
        .map(|row| {
            column_indexes
                .iter()
                .zip(&medians)
                .map(|(&ci, &m)| row.values[ci].unwrap_or(m))
                .collect()
        })
        .collect();
    let matrix = FeatureMatrix {
        row_ids: selected.iter().map(|r| r.recording_id.clone()).collect(),
        feature_names: columns.iter().map(|c| c.to_string()).collect(),
        values,
        labels,
    };
    matrix.validate()?;
    Ok(matrix)
}
