//! C ABI for the hrvbench analysis engine.
//!
//! Recordings travel as opaque [`HrvRecording`] handles created by
//! [`hrv_recording_parse`] and released by [`hrv_recording_free`]. Every
//! fallible function returns an [`HrvStatus`] and writes its result through an
//! out pointer, so the ABI stays exception-free: panics are caught at the
//! boundary and surfaced as `HRV_STATUS_INTERNAL_ERROR`. No function retains a
//! caller pointer past the call.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use hrvbench::eval::{kappa, roc_auroc, ConfusionMatrix};
use hrvbench::features::{extract_recording, ExtractConfig, FEATURE_COLUMNS};
use hrvbench::ingest::{parse_rr_file, RRSeries, RrFormat, Segment};
use hrvbench::HrvError;

/// Result code returned by every fallible ABI call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HrvStatus {
    /// The call succeeded and all out parameters are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was out of range or inconsistent (buffer length, enum value).
    InvalidArgument = 2,
    /// Input text was not valid UTF-8.
    InvalidUtf8 = 3,
    /// The recording text violates the RR-CSV schema.
    ParseError = 4,
    /// The recording or segment holds too little data for the request.
    TooShort = 5,
    /// The data is degenerate for the requested statistic (e.g. one class).
    Degenerate = 6,
    /// The statistic is mathematically undefined for this input.
    Undefined = 7,
    /// An unexpected internal failure; the out parameters are unspecified.
    InternalError = 8,
}

/// Recording segment selector for feature extraction.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HrvSegment {
    /// The full recording.
    Full24h = 0,
    /// Daytime subinterval.
    Day = 1,
    /// Nighttime subinterval.
    Night = 2,
}

/// Opaque handle to a parsed RR recording.
pub struct HrvRecording {
    series: RRSeries,
}

fn status_of(err: &HrvError) -> HrvStatus {
    match err {
        HrvError::InvalidUtf8 => HrvStatus::InvalidUtf8,
        HrvError::MalformedLine(_)
        | HrvError::NonMonotonicTime(_)
        | HrvError::OnsetMismatch(_)
        | HrvError::EmptyRecording => HrvStatus::ParseError,
        HrvError::TooFewBeats
        | HrvError::TooFewIntervals
        | HrvError::SpanTooShort
        | HrvError::NoValidNeighbors
        | HrvError::NoAnchors => HrvStatus::TooShort,
        HrvError::TooSmall(_)
        | HrvError::DegenerateClass
        | HrvError::SingularCovariance
        | HrvError::FoldDegenerate(_)
        | HrvError::SingleClass
        | HrvError::DegenerateCell(_) => HrvStatus::Degenerate,
        HrvError::ArityMismatch { .. } | HrvError::Config(_) => HrvStatus::InvalidArgument,
        HrvError::Io { .. } => HrvStatus::InternalError,
    }
}

fn guarded(body: impl FnOnce() -> HrvStatus) -> HrvStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(HrvStatus::InternalError)
}

/// Returns the library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hrv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Returns a static human-readable message for a status code.
///
/// The pointer is valid for the lifetime of the program and must not be freed.
#[no_mangle]
pub extern "C" fn hrv_status_message(status: HrvStatus) -> *const c_char {
    let msg: &'static str = match status {
        HrvStatus::Ok => "ok\0",
        HrvStatus::NullArgument => "a required pointer argument was null\0",
        HrvStatus::InvalidArgument => "an argument was out of range or inconsistent\0",
        HrvStatus::InvalidUtf8 => "input text was not valid UTF-8\0",
        HrvStatus::ParseError => "recording text violates the RR-CSV schema\0",
        HrvStatus::TooShort => "too little data in the recording or segment\0",
        HrvStatus::Degenerate => "data is degenerate for the requested statistic\0",
        HrvStatus::Undefined => "the statistic is undefined for this input\0",
        HrvStatus::InternalError => "internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// Parses NUL-terminated RR-CSV text into a new recording handle.
///
/// On success writes the handle to `out`; release it with
/// [`hrv_recording_free`]. On failure `out` is left untouched.
///
/// # Safety
///
/// `text` must point to a NUL-terminated byte string and `out` must be a
/// valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hrv_recording_parse(
    text: *const c_char,
    out: *mut *mut HrvRecording,
) -> HrvStatus {
    if text.is_null() || out.is_null() {
        return HrvStatus::NullArgument;
    }
    let bytes = CStr::from_ptr(text).to_bytes();
    guarded(|| match parse_rr_file(bytes, RrFormat::RrCsv) {
        Ok(series) => {
            out.write(Box::into_raw(Box::new(HrvRecording { series })));
            HrvStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Releases a recording handle. Passing null is a no-op.
///
/// # Safety
///
/// `rec` must be null or a handle returned by [`hrv_recording_parse`] that
/// has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn hrv_recording_free(rec: *mut HrvRecording) {
    if !rec.is_null() {
        drop(Box::from_raw(rec));
    }
}

/// Writes the number of beats in the recording to `out`.
///
/// # Safety
///
/// `rec` must be a live handle from [`hrv_recording_parse`] and `out` must be
/// a valid pointer to writable storage for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn hrv_recording_beat_count(
    rec: *const HrvRecording,
    out: *mut usize,
) -> HrvStatus {
    if rec.is_null() || out.is_null() {
        return HrvStatus::NullArgument;
    }
    out.write((*rec).series.beats.len());
    HrvStatus::Ok
}

/// Returns the number of entries in the feature panel.
#[no_mangle]
pub extern "C" fn hrv_feature_count() -> usize {
    FEATURE_COLUMNS.len()
}

/// Returns the static NUL-terminated name of feature `index`, or null when
/// `index` is out of range. Order matches [`hrv_recording_features`].
#[no_mangle]
pub extern "C" fn hrv_feature_name(index: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| {
        FEATURE_COLUMNS
            .iter()
            .map(|name| CString::new(*name).expect("feature names contain no NUL"))
            .collect()
    });
    match names.get(index) {
        Some(name) => name.as_ptr(),
        None => std::ptr::null(),
    }
}

/// Computes the full feature panel for one segment of a recording.
///
/// `values` receives `hrv_feature_count()` doubles in [`hrv_feature_name`]
/// order; indexes that cannot be computed for this recording are written as
/// NaN with `present[i] == 0`, all others get `present[i] == 1`. Returns
/// `HRV_STATUS_TOO_SHORT` when the requested segment holds no analyzable data
/// at all.
///
/// # Safety
///
/// `rec` must be a live handle from [`hrv_recording_parse`]; `values` and
/// `present` must point to writable arrays of at least `len` elements.
#[no_mangle]
pub unsafe extern "C" fn hrv_recording_features(
    rec: *const HrvRecording,
    segment: HrvSegment,
    values: *mut f64,
    present: *mut u8,
    len: usize,
) -> HrvStatus {
    if rec.is_null() || values.is_null() || present.is_null() {
        return HrvStatus::NullArgument;
    }
    if len != FEATURE_COLUMNS.len() {
        return HrvStatus::InvalidArgument;
    }
    let series = &(*rec).series;
    let values = std::slice::from_raw_parts_mut(values, len);
    let present = std::slice::from_raw_parts_mut(present, len);
    guarded(|| {
        let wanted = match segment {
            HrvSegment::Full24h => Segment::Full24h,
            HrvSegment::Day => Segment::Day,
            HrvSegment::Night => Segment::Night,
        };
        let rows = match extract_recording(series, &ExtractConfig::default()) {
            Ok(rows) => rows,
            Err(e) => return status_of(&e),
        };
        let Some(row) = rows.into_iter().find(|row| row.segment == wanted) else {
            return HrvStatus::TooShort;
        };
        for (i, value) in row.values.iter().enumerate() {
            values[i] = value.unwrap_or(f64::NAN);
            present[i] = u8::from(value.is_some());
        }
        HrvStatus::Ok
    })
}

/// Computes Cohen's kappa for a 2x2 confusion matrix.
///
/// Returns `HRV_STATUS_UNDEFINED` when expected agreement is exactly 1 (the
/// coefficient has no value there) and `HRV_STATUS_DEGENERATE` for an empty
/// matrix.
///
/// # Safety
///
/// `out` must be a valid pointer to writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn hrv_kappa(
    true_positives: usize,
    false_negatives: usize,
    false_positives: usize,
    true_negatives: usize,
    out: *mut f64,
) -> HrvStatus {
    if out.is_null() {
        return HrvStatus::NullArgument;
    }
    let cm = ConfusionMatrix {
        tp: true_positives,
        fn_: false_negatives,
        fp: false_positives,
        tn: true_negatives,
    };
    if cm.total() == 0 {
        return HrvStatus::Degenerate;
    }
    guarded(|| match kappa(&cm) {
        Some(value) => {
            out.write(value);
            HrvStatus::Ok
        }
        None => HrvStatus::Undefined,
    })
}

/// Computes the area under the ROC curve.
///
/// `labels` holds `len` class indicators (1 = positive, 0 = negative) and
/// `scores` the matching classifier scores. Returns `HRV_STATUS_DEGENERATE`
/// when only one class is present.
///
/// # Safety
///
/// `labels` and `scores` must point to readable arrays of at least `len`
/// elements and `out` must be a valid pointer to writable storage for one
/// double.
#[no_mangle]
pub unsafe extern "C" fn hrv_auroc(
    labels: *const u8,
    scores: *const f64,
    len: usize,
    out: *mut f64,
) -> HrvStatus {
    if labels.is_null() || scores.is_null() || out.is_null() {
        return HrvStatus::NullArgument;
    }
    if len == 0 {
        return HrvStatus::InvalidArgument;
    }
    let labels = std::slice::from_raw_parts(labels, len);
    let scores = std::slice::from_raw_parts(scores, len);
    if labels.iter().any(|&l| l > 1) {
        return HrvStatus::InvalidArgument;
    }
    guarded(|| match roc_auroc(labels, scores) {
        Ok((_, auroc)) => {
            out.write(auroc);
            HrvStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}
