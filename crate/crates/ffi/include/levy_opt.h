#ifndef LEVY_OPT_H
#define LEVY_OPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LevyBoundary {
  LEVY_BOUNDARY_INTERIOR = 0,
  LEVY_BOUNDARY_LOWER = 1,
  LEVY_BOUNDARY_UPPER = 2,
} LevyBoundary;

typedef enum LevyGnKind {
  LEVY_GN_KIND_QUADRATURE = 0,
  LEVY_GN_KIND_MONTE_CARLO = 1,
} LevyGnKind;

/**
 * Status codes returned by every fallible function.
 */
typedef enum LevyStatus {
  LEVY_STATUS_OK = 0,
  /**
   * The model violates an assumption or the config could not be parsed.
   */
  LEVY_STATUS_INVALID_MODEL = 1,
  /**
   * A solver or integration step failed.
   */
  LEVY_STATUS_NUMERICAL = 2,
  /**
   * Strategy outside the domain of the function.
   */
  LEVY_STATUS_DOMAIN = 3,
  LEVY_STATUS_INVALID_ARGUMENT = 4,
  LEVY_STATUS_NULL_POINTER = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  LEVY_STATUS_PANIC = 6,
} LevyStatus;

/**
 * Opaque model handle.
 */
typedef struct LevyModel LevyModel;

/**
 * How `g^N` is evaluated. Pass NULL where accepted for quadrature with
 * default settings.
 */
typedef struct LevyGnOptions {
  enum LevyGnKind kind;
  /**
   * Monte Carlo sample count.
   */
  size_t paths;
  uint64_t seed;
  bool antithetic;
  /**
   * Gauss-Hermite node count.
   */
  size_t nodes;
  /**
   * Jump-count cutoff for quadrature; 0 picks it from the Poisson tail.
   */
  size_t max_jumps;
} LevyGnOptions;

typedef struct LevySolution {
  double argmax;
  double value;
  /**
   * Derivative at the argmax (one-sided at a boundary).
   */
  double derivative;
  enum LevyBoundary boundary;
  size_t iterations;
} LevySolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default evaluation options: quadrature with 64 nodes, automatic cutoff,
 * and 100000 Monte Carlo paths with seed 0 if `kind` is switched.
 */
struct LevyGnOptions levy_gn_options_default(void);

/**
 * Builds a model from its triplet. `sizes` and `intensities` hold
 * `n_atoms` entries each and may be NULL when `n_atoms` is 0. The model is
 * not validated here; see [`levy_model_validate`].
 *
 * # Safety
 * `sizes` and `intensities` must point to `n_atoms` readable doubles and
 * `out` must be writable.
 */
enum LevyStatus levy_model_new(double b,
                               double c,
                               const double *sizes,
                               const double *intensities,
                               size_t n_atoms,
                               double horizon,
                               double x0,
                               double p,
                               struct LevyModel **out);

/**
 * Parses a JSON model document `{"b", "c", "atoms": [{"x", "lambda"}], "T", "x0", "p"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum LevyStatus levy_model_from_json(const char *json, struct LevyModel **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void levy_model_free(struct LevyModel *model);

/**
 * `LEVY_STATUS_OK` if every assumption holds, otherwise
 * `LEVY_STATUS_INVALID_MODEL` with the failed assumptions as message.
 *
 * # Safety
 * `model` must be a live handle.
 */
enum LevyStatus levy_model_validate(const struct LevyModel *model);

/**
 * Cumulant exponent `κ(u) = log E[exp(u L̃_1)]` of the log-price.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum LevyStatus levy_cumulant(const struct LevyModel *model, double u, double *out);

/**
 * Continuous-time growth rate `g(π)`; may be `-inf` at a closed endpoint.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum LevyStatus levy_eval_g(const struct LevyModel *model, double pi, double *out);

/**
 * `g'(π)` on the interior of the admissible set.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum LevyStatus levy_eval_g_prime(const struct LevyModel *model, double pi, double *out);

/**
 * N-period growth rate `g^N(π)` for `π ∈ [0, 1]`. `std_error` may be NULL;
 * it receives 0 for quadrature.
 *
 * # Safety
 * `model` must be a live handle, `opts` NULL or readable, `out` writable.
 */
enum LevyStatus levy_eval_gn(const struct LevyModel *model,
                             size_t periods,
                             double pi,
                             const struct LevyGnOptions *opts,
                             double *out,
                             double *std_error);

/**
 * `(g^N)'(π)` for `π ∈ [0, 1]`.
 *
 * # Safety
 * As for [`levy_eval_gn`].
 */
enum LevyStatus levy_eval_gn_prime(const struct LevyModel *model,
                                   size_t periods,
                                   double pi,
                                   const struct LevyGnOptions *opts,
                                   double *out,
                                   double *std_error);

/**
 * Maximizes `g` over `[0, 1]` (`constrained`) or the admissible set.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum LevyStatus levy_solve_continuous(const struct LevyModel *model,
                                      bool constrained,
                                      struct LevySolution *out);

/**
 * Maximizes `g^N` over `[0, 1]`.
 *
 * # Safety
 * `model` must be a live handle, `opts` NULL or readable, `out` writable.
 */
enum LevyStatus levy_solve_discrete(const struct LevyModel *model,
                                    size_t periods,
                                    const struct LevyGnOptions *opts,
                                    struct LevySolution *out);

/**
 * Copies the calling thread's last error message into `buf` (always
 * NUL-terminated when `len > 0`) and returns the full message length
 * without the terminator. Returns 0 if the last call succeeded.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t levy_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *levy_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVY_OPT_H */
