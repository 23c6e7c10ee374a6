#ifndef BLACKGREEDY_H
#define BLACKGREEDY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Response oracle of a learner.
 */
typedef enum BgResponder {
  /**
   * `θ ∝ −w` (pure-form payoffs).
   */
  BG_RESPONDER_PROPORTIONAL = 0,
  /**
   * Saddle-point response for lattice bi-greedy payoffs.
   */
  BG_RESPONDER_NSM_SADDLE = 1,
} BgResponder;

/**
 * Result code of every fallible call.
 */
typedef enum BgStatus {
  BG_STATUS_OK = 0,
  BG_STATUS_NULL_POINTER = 1,
  BG_STATUS_INVALID_ARGUMENT = 2,
  BG_STATUS_CONFIG_ERROR = 3,
  BG_STATUS_CONTRACT_VIOLATION = 4,
  BG_STATUS_SOLVER_ERROR = 5,
  BG_STATUS_IO_ERROR = 6,
  BG_STATUS_PANIC = 7,
} BgStatus;

/**
 * Opaque full-information Blackwell learner.
 */
typedef struct BgBlackwell BgBlackwell;

/**
 * Opaque result of an experiment run.
 */
typedef struct BgReport BgReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next failing call
 * on the same thread; do not free.
 */
const char *bg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bg_version(void);

/**
 * Creates a learner over `d` coordinates with payoff diameter `payoff_diameter`;
 * `horizon = 0` selects anytime learning rates. `BG_RESPONDER_NSM_SADDLE` requires `d ≥ 2`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum BgStatus bg_blackwell_new(size_t d,
                               double payoff_diameter,
                               size_t horizon,
                               enum BgResponder responder,
                               struct BgBlackwell **out);

/**
 * Number of coordinates of the learner, 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle from `bg_blackwell_new`.
 */
size_t bg_blackwell_dim(const struct BgBlackwell *h);

/**
 * Copies the current action `θ` into `out[0..len]`; `len` must equal the dimension.
 *
 * # Safety
 * `h` must be a live handle; `out` must be valid for `len` writes.
 */
enum BgStatus bg_blackwell_theta(const struct BgBlackwell *h, double *out, size_t len);

/**
 * Feeds one payoff vector `payoff[0..len]` and updates the action.
 *
 * # Safety
 * `h` must be a live handle; `payoff` must be valid for `len` reads.
 */
enum BgStatus bg_blackwell_observe(struct BgBlackwell *h, const double *payoff, size_t len);

/**
 * Releases a learner; null is a no-op.
 *
 * # Safety
 * `h` must be null or a handle from `bg_blackwell_new` not yet freed.
 */
void bg_blackwell_free(struct BgBlackwell *h);

/**
 * Runs the experiment described by the JSON config (same schema as the CLI) without writing
 * any file, and returns its report.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be valid for writing one pointer.
 */
enum BgStatus bg_run_experiment(const char *config_json, struct BgReport **out);

/**
 * Final γ-regret of the run, NaN for a null handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
double bg_report_gamma_regret(const struct BgReport *r);

/**
 * Number of rounds in the run, 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
size_t bg_report_rounds(const struct BgReport *r);

/**
 * Copies the cumulative γ-regret after every round into `out[0..len]`; `len` must equal
 * the number of rounds.
 *
 * # Safety
 * `r` must be a live report handle; `out` must be valid for `len` writes.
 */
enum BgStatus bg_report_cum_regret(const struct BgReport *r, double *out, size_t len);

/**
 * Summary of the run as a JSON string owned by the caller (free with `bg_string_free`), or
 * null on failure.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
char *bg_report_json(const struct BgReport *r);

/**
 * Releases a report; null is a no-op.
 *
 * # Safety
 * `r` must be null or a report handle not yet freed.
 */
void bg_report_free(struct BgReport *r);

/**
 * Releases a string returned by this library; null is a no-op.
 *
 * # Safety
 * `s` must be null or a string from `bg_report_json` not yet freed.
 */
void bg_string_free(char *s);

/**
 * Log-log least-squares slope of `regrets` against `horizons` (at least four points). On
 * nonpositive regrets returns `BG_STATUS_INVALID_ARGUMENT` and still writes the slope of the
 * data clamped at 1e-9.
 *
 * # Safety
 * `horizons` and `regrets` must be valid for `len` reads; `out` for one write.
 */
enum BgStatus bg_fit_slope(const double *horizons, const double *regrets, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLACKGREEDY_H */
