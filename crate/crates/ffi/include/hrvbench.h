#ifndef HRVBENCH_H
#define HRVBENCH_H

/* Generated by cbindgen from hrvbench-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Recording segment selector for feature extraction.
 */
typedef enum HrvSegment {
  /**
   * The full recording.
   */
  HRV_SEGMENT_FULL24H = 0,
  /**
   * Daytime subinterval.
   */
  HRV_SEGMENT_DAY = 1,
  /**
   * Nighttime subinterval.
   */
  HRV_SEGMENT_NIGHT = 2,
} HrvSegment;

/**
 * Result code returned by every fallible ABI call.
 */
typedef enum HrvStatus {
  /**
   * The call succeeded and all out parameters are valid.
   */
  HRV_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HRV_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument was out of range or inconsistent (buffer length, enum value).
   */
  HRV_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input text was not valid UTF-8.
   */
  HRV_STATUS_INVALID_UTF8 = 3,
  /**
   * The recording text violates the RR-CSV schema.
   */
  HRV_STATUS_PARSE_ERROR = 4,
  /**
   * The recording or segment holds too little data for the request.
   */
  HRV_STATUS_TOO_SHORT = 5,
  /**
   * The data is degenerate for the requested statistic (e.g. one class).
   */
  HRV_STATUS_DEGENERATE = 6,
  /**
   * The statistic is mathematically undefined for this input.
   */
  HRV_STATUS_UNDEFINED = 7,
  /**
   * An unexpected internal failure; the out parameters are unspecified.
   */
  HRV_STATUS_INTERNAL_ERROR = 8,
} HrvStatus;

/**
 * Opaque handle to a parsed RR recording.
 */
typedef struct HrvRecording HrvRecording;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the library version as a static NUL-terminated string.
 */
const char *hrv_version(void);

/**
 * Returns a static human-readable message for a status code.
 *
 * The pointer is valid for the lifetime of the program and must not be freed.
 */
const char *hrv_status_message(enum HrvStatus status);

/**
 * Parses NUL-terminated RR-CSV text into a new recording handle.
 *
 * On success writes the handle to `out`; release it with
 * [`hrv_recording_free`]. On failure `out` is left untouched.
 *
 * # Safety
 *
 * `text` must point to a NUL-terminated byte string and `out` must be a
 * valid pointer to writable storage for one pointer.
 */
enum HrvStatus hrv_recording_parse(const char *text, struct HrvRecording **out);

/**
 * Releases a recording handle. Passing null is a no-op.
 *
 * # Safety
 *
 * `rec` must be null or a handle returned by [`hrv_recording_parse`] that
 * has not been freed already.
 */
void hrv_recording_free(struct HrvRecording *rec);

/**
 * Writes the number of beats in the recording to `out`.
 *
 * # Safety
 *
 * `rec` must be a live handle from [`hrv_recording_parse`] and `out` must be
 * a valid pointer to writable storage for one `size_t`.
 */
enum HrvStatus hrv_recording_beat_count(const struct HrvRecording *rec, size_t *out);

/**
 * Returns the number of entries in the feature panel.
 */
size_t hrv_feature_count(void);

/**
 * Returns the static NUL-terminated name of feature `index`, or null when
 * `index` is out of range. Order matches [`hrv_recording_features`].
 */
const char *hrv_feature_name(size_t index);

/**
 * Computes the full feature panel for one segment of a recording.
 *
 * `values` receives `hrv_feature_count()` doubles in [`hrv_feature_name`]
 * order; indexes that cannot be computed for this recording are written as
 * NaN with `present[i] == 0`, all others get `present[i] == 1`. Returns
 * `HRV_STATUS_TOO_SHORT` when the requested segment holds no analyzable data
 * at all.
 *
 * # Safety
 *
 * `rec` must be a live handle from [`hrv_recording_parse`]; `values` and
 * `present` must point to writable arrays of at least `len` elements.
 */
enum HrvStatus hrv_recording_features(const struct HrvRecording *rec,
                                      enum HrvSegment segment,
                                      double *values,
                                      uint8_t *present,
                                      size_t len);

/**
 * Computes Cohen's kappa for a 2x2 confusion matrix.
 *
 * Returns `HRV_STATUS_UNDEFINED` when expected agreement is exactly 1 (the
 * coefficient has no value there) and `HRV_STATUS_DEGENERATE` for an empty
 * matrix.
 *
 * # Safety
 *
 * `out` must be a valid pointer to writable storage for one double.
 */
enum HrvStatus hrv_kappa(size_t true_positives,
                         size_t false_negatives,
                         size_t false_positives,
                         size_t true_negatives,
                         double *out);

/**
 * Computes the area under the ROC curve.
 *
 * `labels` holds `len` class indicators (1 = positive, 0 = negative) and
 * `scores` the matching classifier scores. Returns `HRV_STATUS_DEGENERATE`
 * when only one class is present.
 *
 * # Safety
 *
 * `labels` and `scores` must point to readable arrays of at least `len`
 * elements and `out` must be a valid pointer to writable storage for one
 * double.
 */
enum HrvStatus hrv_auroc(const uint8_t *labels, const double *scores, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HRVBENCH_H */
