#ifndef COOPNAV_H
#define COOPNAV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CoopnavCueKind {
  COOPNAV_CUE_KIND_INFORM_DIRECTION = 0,
  COOPNAV_CUE_KIND_INFORM_CONSTRAINED_SUGGEST_DIRECTION = 1,
  COOPNAV_CUE_KIND_INDICATE_WILL_DOCK_IF_NEEDED = 2,
  COOPNAV_CUE_KIND_ASK_MOVE_MORE = 3,
  COOPNAV_CUE_KIND_DOCK_TO_WALL = 4,
  COOPNAV_CUE_KIND_THANK_YOU = 5,
  COOPNAV_CUE_KIND_SILENT = 6,
} CoopnavCueKind;

typedef enum CoopnavDirection {
  COOPNAV_DIRECTION_LEFT = 0,
  COOPNAV_DIRECTION_RIGHT = 1,
} CoopnavDirection;

typedef enum CoopnavStatus {
  COOPNAV_STATUS_OK = 0,
  COOPNAV_STATUS_NULL_POINTER = 1,
  COOPNAV_STATUS_INVALID_ARGUMENT = 2,
  COOPNAV_STATUS_NO_OBSERVATIONS = 3,
  COOPNAV_STATUS_CONFIG = 4,
  COOPNAV_STATUS_PLANNING = 5,
  COOPNAV_STATUS_IO = 6,
  COOPNAV_STATUS_INTERNAL = 7,
} CoopnavStatus;

/**
 * Opaque contribution recorder.
 */
typedef struct CoopnavRecorder CoopnavRecorder;

/**
 * Opaque result of a scenario run.
 */
typedef struct CoopnavRun CoopnavRun;

typedef struct CoopnavThresholds {
  double tau_h;
  double tau_oh;
  double tau_or;
  double tau_hr;
  double gamma;
  double tau_cm;
} CoopnavThresholds;

/**
 * Clearances at the crossing point, m.
 */
typedef struct CoopnavClearances {
  double d_h;
  double d_oh;
  double d_or;
  double d_hr;
} CoopnavClearances;

typedef struct CoopnavPredicates {
  bool human_needs_to_contribute;
  bool human_is_constrained;
  bool robot_is_constrained;
} CoopnavPredicates;

typedef struct CoopnavCue {
  enum CoopnavCueKind kind;
  /**
   * Meaningful only when `has_direction` is true.
   */
  enum CoopnavDirection direction;
  bool has_direction;
} CoopnavCue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. Valid
 * until the next library call on the same thread.
 */
const char *coopnav_last_error_message(void);

struct CoopnavThresholds coopnav_thresholds_default(void);

/**
 * Creates an empty recorder with discount factor `gamma` in (0, 1).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CoopnavStatus coopnav_recorder_new(double gamma, struct CoopnavRecorder **out);

/**
 * # Safety
 * `rec` must be NULL or a handle from [`coopnav_recorder_new`] not yet freed.
 */
void coopnav_recorder_free(struct CoopnavRecorder *rec);

/**
 * Appends one signed contribution value.
 *
 * # Safety
 * `rec` must be a live recorder handle.
 */
enum CoopnavStatus coopnav_recorder_push(struct CoopnavRecorder *rec, double value);

/**
 * Records the signed deviation of the human at `(hx, hy)` from the path
 * given as `n_points` interleaved `x, y` pairs, signed by the robot's side.
 * The value is written to `out_value` when it is not NULL.
 *
 * # Safety
 * `rec` must be a live recorder handle; `path_xy` must point to
 * `2 * n_points` readable doubles.
 */
enum CoopnavStatus coopnav_recorder_record(struct CoopnavRecorder *rec,
                                           double hx,
                                           double hy,
                                           const double *path_xy,
                                           size_t n_points,
                                           double rx,
                                           double ry,
                                           double *out_value);

/**
 * # Safety
 * `rec` must be a live recorder handle and `out` writable.
 */
enum CoopnavStatus coopnav_recorder_len(const struct CoopnavRecorder *rec, size_t *out);

/**
 * Discounted mean of the recorded series; `NoObservations` when empty.
 *
 * # Safety
 * `rec` must be a live recorder handle and `out` writable.
 */
enum CoopnavStatus coopnav_recorder_metric(const struct CoopnavRecorder *rec, double *out);

/**
 * Empties the series, keeping gamma.
 *
 * # Safety
 * `rec` must be a live recorder handle.
 */
enum CoopnavStatus coopnav_recorder_reset(struct CoopnavRecorder *rec);

/**
 * Discounted mean of `n` values for any `gamma > 0`.
 *
 * # Safety
 * `values` must point to `n` readable doubles and `out` be writable.
 */
enum CoopnavStatus coopnav_discounted_mean(const double *values,
                                           size_t n,
                                           double gamma,
                                           double *out);

/**
 * Evaluates the three situation predicates.
 *
 * # Safety
 * All pointers must be valid; `out` writable.
 */
enum CoopnavStatus coopnav_assess_situation(const struct CoopnavClearances *clearances,
                                            const struct CoopnavThresholds *th,
                                            struct CoopnavPredicates *out);

/**
 * The cue the first checkpoint emits for the given predicates.
 *
 * # Safety
 * `preds` must be readable and `out` writable.
 */
enum CoopnavStatus coopnav_first_checkpoint(const struct CoopnavPredicates *preds,
                                            enum CoopnavDirection direction,
                                            struct CoopnavCue *out);

/**
 * Runs the scenario described by a TOML config string.
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string; `out` writable.
 */
enum CoopnavStatus coopnav_run_config(const char *config_toml, struct CoopnavRun **out);

/**
 * Runs one of the built-in scenarios (`open_minimal`, `open_facilitating`,
 * `narrow_minimal`, `narrow_facilitating`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` writable.
 */
enum CoopnavStatus coopnav_run_builtin(const char *name, struct CoopnavRun **out);

/**
 * # Safety
 * `run` must be NULL or a live run handle.
 */
void coopnav_run_free(struct CoopnavRun *run);

/**
 * # Safety
 * `run` must be a live run handle and `out` writable.
 */
enum CoopnavStatus coopnav_run_final_cm(const struct CoopnavRun *run, double *out);

/**
 * # Safety
 * `run` must be a live run handle and `out` writable.
 */
enum CoopnavStatus coopnav_run_timed_out(const struct CoopnavRun *run, bool *out);

/**
 * The run's cue events as a JSON array. Free with [`coopnav_string_free`].
 *
 * # Safety
 * `run` must be a live run handle and `out` writable.
 */
enum CoopnavStatus coopnav_run_events_json(const struct CoopnavRun *run, char **out);

/**
 * The full run trace as JSON lines. Free with [`coopnav_string_free`].
 *
 * # Safety
 * `run` must be a live run handle and `out` writable.
 */
enum CoopnavStatus coopnav_run_trace_jsonl(const struct CoopnavRun *run, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void coopnav_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COOPNAV_H */
