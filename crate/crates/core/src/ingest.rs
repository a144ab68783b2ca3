//! RR-interval recording ingestion: RR-CSV parsing, NN filtering, and
//! 24h/day/night segmentation.
//!
//! RR-CSV is the canonical input format: UTF-8, LF line endings, optional
//! `#`-prefixed comment lines (`# recording_id=<text>`, `# start_clock=HH:MM:SS`)
//! followed by the header `onset_ms,rr_ms,label` and one beat per row. Each row
//! describes the beat at `onset_ms` together with the interval `rr_ms` that
//! runs forward from that beat to the next one, so consecutive rows satisfy
//! `onset[i+1] == onset[i] + rr[i]` within 1 ms.

use serde::{Deserialize, Serialize};

use crate::{HrvError, Result};

pub const MS_PER_DAY: f64 = 86_400_000.0;

/// Minimum analyzable span for a recording to count as a full 24h Holter.
pub const FULL_24H_MIN_MS: f64 = 20.0 * 3_600_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeatLabel {
    Normal,
    Ventricular,
    Artifact,
    Unknown,
}

impl BeatLabel {
    pub fn code(self) -> char {
        match self {
            BeatLabel::Normal => 'N',
            BeatLabel::Ventricular => 'V',
            BeatLabel::Artifact => 'A',
            BeatLabel::Unknown => 'U',
        }
    }

    fn from_code(code: &str) -> BeatLabel {
        match code {
            "N" => BeatLabel::Normal,
            "V" => BeatLabel::Ventricular,
            "A" => BeatLabel::Artifact,
            _ => BeatLabel::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Beat {
    /// Cumulative milliseconds from recording start.
    pub onset_ms: f64,
    /// Interval from this beat to the next, in milliseconds.
    pub rr_ms: f64,
    pub label: BeatLabel,
}

#[derive(Debug, Clone)]
pub struct RRSeries {
    pub recording_id: String,
    /// Wall-clock time of recording start, seconds since midnight.
    pub start_clock_s: u32,
    pub beats: Vec<Beat>,
}

impl RRSeries {
    /// Span covered by the recording, including the last beat's interval.
    pub fn duration_ms(&self) -> f64 {
        match (self.beats.first(), self.beats.last()) {
            (Some(first), Some(last)) => last.onset_ms + last.rr_ms - first.onset_ms,
            _ => 0.0,
        }
    }

    /// True when the recording spans enough signal to be treated as a 24h
    /// Holter (>= 20 h); shorter recordings are still processed but flagged.
    pub fn is_full_24h(&self) -> bool {
        self.duration_ms() >= FULL_24H_MIN_MS
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Full24h,
    Day,
    Night,
}

impl Segment {
    pub fn as_str(self) -> &'static str {
        match self {
            Segment::Full24h => "24h",
            Segment::Day => "day",
            Segment::Night => "night",
        }
    }
}

/// Filtered normal-to-normal interval series.
///
/// `onset_ms[i]` is the onset of the interval's starting beat; the interval
/// terminates at `onset_ms[i] + intervals_ms[i]`.
#[derive(Debug, Clone)]
pub struct NNSeries {
    pub recording_id: String,
    pub start_clock_s: u32,
    pub segment: Segment,
    pub intervals_ms: Vec<f64>,
    pub onset_ms: Vec<f64>,
}

impl NNSeries {
    pub fn len(&self) -> usize {
        self.intervals_ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals_ms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub min_nn_ms: f64,
    pub max_nn_ms: f64,
    pub relative_jump_fraction: f64,
    pub median_window_beats: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_nn_ms: 300.0,
            max_nn_ms: 2000.0,
            relative_jump_fraction: 0.20,
            median_window_beats: 11,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentSpec {
    /// Day window start, seconds since midnight.
    pub day_start_s: u32,
    /// Day window end (exclusive), seconds since midnight.
    pub day_end_s: u32,
}

impl Default for SegmentSpec {
    fn default() -> Self {
        SegmentSpec {
            day_start_s: 8 * 3600,
            day_end_s: 20 * 3600,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrFormat {
    RrCsv,
}

pub const RR_CSV_HEADER: &str = "onset_ms,rr_ms,label";

/// Parse `HH:MM:SS` into seconds since midnight.
pub fn parse_clock(text: &str) -> Option<u32> {
    let mut parts = text.split(':');
    let h: u32 = parts.next()?.parse().ok()?;
    let m: u32 = parts.next()?.parse().ok()?;
    let s: u32 = parts.next()?.parse().ok()?;
    if parts.next().is_some() || h > 23 || m > 59 || s > 59 {
        return None;
    }
    Some(h * 3600 + m * 60 + s)
}

pub fn format_clock(seconds: u32) -> String {
    format!(
        "{:02}:{:02}:{:02}",
        seconds / 3600,
        (seconds / 60) % 60,
        seconds % 60
    )
}

fn format_ms(v: f64) -> String {
    // Integral millisecond values serialize without a fractional part so that
    // parse -> serialize round-trips byte-identically on generated files.
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub fn parse_rr_file(bytes: &[u8], format: RrFormat) -> Result<RRSeries> {
    let RrFormat::RrCsv = format;
    let text = std::str::from_utf8(bytes).map_err(|_| HrvError::InvalidUtf8)?;

    let mut recording_id = String::new();
    let mut start_clock_s = 0u32;
    let mut beats: Vec<Beat> = Vec::new();
    let mut seen_header = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim_end();
        if line.is_empty() {
            continue;
        }
        if !seen_header {
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(value) = comment.strip_prefix("recording_id=") {
                    recording_id = value.trim().to_string();
                } else if let Some(value) = comment.strip_prefix("start_clock=") {
                    start_clock_s =
                        parse_clock(value.trim()).ok_or(HrvError::MalformedLine(line_no))?;
                }
                // Unrecognized comments are ignored.
                continue;
            }
            if line != RR_CSV_HEADER {
                return Err(HrvError::MalformedLine(line_no));
            }
            seen_header = true;
            continue;
        }

        let mut fields = line.split(',');
        let (Some(onset_txt), Some(rr_txt), Some(label_txt), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(HrvError::MalformedLine(line_no));
        };
        let onset_ms: f64 = onset_txt
            .trim()
            .parse()
            .map_err(|_| HrvError::MalformedLine(line_no))?;
        let rr_ms: f64 = rr_txt
            .trim()
            .parse()
            .map_err(|_| HrvError::MalformedLine(line_no))?;
        if !onset_ms.is_finite() || !rr_ms.is_finite() || rr_ms <= 0.0 {
            return Err(HrvError::MalformedLine(line_no));
        }
        let label = BeatLabel::from_code(label_txt.trim());

        if let Some(prev) = beats.last() {
            if onset_ms <= prev.onset_ms {
                return Err(HrvError::NonMonotonicTime(line_no));
            }
            if (onset_ms - (prev.onset_ms + prev.rr_ms)).abs() > 1.0 {
                return Err(HrvError::OnsetMismatch(line_no));
            }
        }
        beats.push(Beat {
            onset_ms,
            rr_ms,
            label,
        });
    }

    if beats.is_empty() {
        return Err(HrvError::EmptyRecording);
    }
    Ok(RRSeries {
        recording_id,
        start_clock_s,
        beats,
    })
}

/// Serialize back to RR-CSV. Data rows round-trip byte-identically through
/// `parse_rr_file` for integral-millisecond recordings.
pub fn serialize_rr(series: &RRSeries) -> String {
    let mut out = String::with_capacity(series.beats.len() * 16 + 64);
    if !series.recording_id.is_empty() {
        out.push_str("# recording_id=");
        out.push_str(&series.recording_id);
        out.push('\n');
    }
    out.push_str("# start_clock=");
    out.push_str(&format_clock(series.start_clock_s));
    out.push('\n');
    out.push_str(RR_CSV_HEADER);
    out.push('\n');
    for beat in &series.beats {
        out.push_str(&format_ms(beat.onset_ms));
        out.push(',');
        out.push_str(&format_ms(beat.rr_ms));
        out.push(',');
        out.push(beat.label.code());
        out.push('\n');
    }
    out
}

/// Filter a raw RR series down to accepted normal-to-normal intervals.
///
/// An interval is accepted when both endpoint beats are Normal, its length is
/// within `[min_nn_ms, max_nn_ms]`, and it deviates from the running median of
/// the previously accepted `median_window_beats` intervals by no more than
/// `relative_jump_fraction` (the median test is skipped until one interval has
/// been accepted).
pub fn filter_to_nn(series: &RRSeries, cfg: &FilterConfig) -> Result<NNSeries> {
    let mut intervals = Vec::new();
    let mut onsets = Vec::new();
    let mut window: Vec<f64> = Vec::with_capacity(cfg.median_window_beats);

    for pair in series.beats.windows(2) {
        let (beat, next) = (&pair[0], &pair[1]);
        if beat.label != BeatLabel::Normal || next.label != BeatLabel::Normal {
            continue;
        }
        let rr = beat.rr_ms;
        if rr < cfg.min_nn_ms || rr > cfg.max_nn_ms {
            continue;
        }
        if !window.is_empty() {
            let med = median(&window);
            if (rr - med).abs() > cfg.relative_jump_fraction * med {
                continue;
            }
        }
        intervals.push(rr);
        onsets.push(beat.onset_ms);
        window.push(rr);
        if window.len() > cfg.median_window_beats {
            window.remove(0);
        }
    }

    if intervals.len() < 2 {
        return Err(HrvError::TooFewBeats);
    }
    Ok(NNSeries {
        recording_id: series.recording_id.clone(),
        start_clock_s: series.start_clock_s,
        segment: Segment::Full24h,
        intervals_ms: intervals,
        onset_ms: onsets,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[derive(Debug, Clone)]
pub struct SegmentedSeries {
    pub full: NNSeries,
    pub day: NNSeries,
    pub night: NNSeries,
}

/// Split an NN series into 24h/day/night segments.
///
/// Each interval is assigned by the wall-clock time of its terminating beat:
/// day = [day_start, day_end), night = the complement. The full segment is the
/// input unchanged, so day and night partition it.
pub fn segment(series: &NNSeries, spec: &SegmentSpec) -> SegmentedSeries {
    let mut day = NNSeries {
        recording_id: series.recording_id.clone(),
        start_clock_s: series.start_clock_s,
        segment: Segment::Day,
        intervals_ms: Vec::new(),
        onset_ms: Vec::new(),
    };
    let mut night = NNSeries {
        segment: Segment::Night,
        ..day.clone()
    };

    let ds = spec.day_start_s as f64 * 1000.0;
    let de = spec.day_end_s as f64 * 1000.0;
    for (&rr, &onset) in series.intervals_ms.iter().zip(&series.onset_ms) {
        let end_clock_ms =
            (series.start_clock_s as f64 * 1000.0 + onset + rr).rem_euclid(MS_PER_DAY);
        let in_day = if ds <= de {
            end_clock_ms >= ds && end_clock_ms < de
        } else {
            end_clock_ms >= ds || end_clock_ms < de
        };
        let target = if in_day { &mut day } else { &mut night };
        target.intervals_ms.push(rr);
        target.onset_ms.push(onset);
    }

    let mut full = series.clone();
    full.segment = Segment::Full24h;
    SegmentedSeries { full, day, night }
}
