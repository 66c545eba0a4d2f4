/* C interface to the pagesim paging simulator. */

#ifndef PAGESIM_H
#define PAGESIM_H

/* Generated by cbindgen from crates/pagesim-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. `PS_STATUS_OK` is zero; everything else is an error.
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  // Unexpected internal failure (a bug; never expected from valid use).
  PS_STATUS_INTERNAL = 1,
  // Malformed or out-of-range input.
  PS_STATUS_VALIDATION = 2,
  // A call sequence broke an operation's contract.
  PS_STATUS_CONTRACT = 3,
  // A predictor query violated the access model.
  PS_STATUS_ACCESS = 4,
  // An exact-oracle instance exceeded its size guard.
  PS_STATUS_TOO_LARGE = 5,
  // File system failure.
  PS_STATUS_IO = 6,
  // A required pointer argument was null.
  PS_STATUS_NULL_ARGUMENT = 7,
  // A string argument was not valid UTF-8.
  PS_STATUS_INVALID_STRING = 8,
} PsStatus;

// Synthetic trace families for [`ps_trace_generate`].
typedef enum PsTraceKind {
  // Independent uniform draws; `param` ignored.
  PS_TRACE_KIND_UNIFORM = 0,
  // Fixed cycle; `param` is the cycle length.
  PS_TRACE_KIND_CYCLIC = 1,
  // Rank power law; `param` is the exponent.
  PS_TRACE_KIND_ZIPF = 2,
  // Working-set phases; `param` is the phase length.
  PS_TRACE_KIND_PHASED_ADVERSARIAL = 3,
} PsTraceKind;

// Corruption models for [`ps_predictor_corrupt`].
typedef enum PsNoiseModel {
  // Add `offset`, clamped into the legal range.
  PS_NOISE_MODEL_OFFSET = 0,
  // Replace with a uniform draw from the legal range.
  PS_NOISE_MODEL_UNIFORM_RESAMPLE = 1,
  // Replace with the extreme true arrival farthest from the truth.
  PS_NOISE_MODEL_ADVERSARIAL_SWAP = 2,
} PsNoiseModel;

// Opaque predictor handle (one next-arrival prediction stream).
typedef struct PsPredictor PsPredictor;

// Opaque trace handle (request sequence plus next-arrival table).
typedef struct PsTrace PsTrace;

// Exact accuracy measures of one predictor stream.
typedef struct PsMetrics {
  uint64_t error_rounds;
  uint64_t inverted_pairs;
  uint64_t inverted_rounds;
  uint64_t eta_refined;
  uint64_t l1;
} PsMetrics;

// Cost summary of one run. `opt` is the exact offline optimum for the same
// trace and the default initial cache; `regret = cost - opt`.
typedef struct PsRunStats {
  uint64_t cost;
  uint64_t opt;
  int64_t regret;
} PsRunStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns a static description of a status code.
const char *ps_status_message(enum PsStatus status);

// Generates a synthetic trace. `param` carries the kind-specific value (see
// [`PsTraceKind`]). On success stores a new handle in `*out`.
//
// # Safety
// `out` must be a valid pointer to a `PsTrace *`.
enum PsStatus ps_trace_generate(enum PsTraceKind kind,
                                uint32_t n,
                                uint64_t horizon,
                                uint64_t seed,
                                double param,
                                struct PsTrace **out);

// Loads a trace file (`t,page` rows). `n_override` of zero means "take `n`
// from the file's `# n=<int>` header".
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a valid pointer.
enum PsStatus ps_trace_load(const char *path, uint32_t n_override, struct PsTrace **out);

// Releases a trace handle. Null is ignored.
//
// # Safety
// `trace` must be null or a handle from this library, not yet freed.
void ps_trace_free(struct PsTrace *trace);

// Number of real rounds `T`.
//
// # Safety
// `trace` must be a live handle from this library.
uint64_t ps_trace_horizon(const struct PsTrace *trace);

// Page-universe size `n`.
//
// # Safety
// `trace` must be a live handle from this library.
uint32_t ps_trace_universe(const struct PsTrace *trace);

// Creates the error-free predictor for `trace`.
//
// # Safety
// `trace` must be a live handle and `out` a valid pointer.
enum PsStatus ps_predictor_perfect(const struct PsTrace *trace, struct PsPredictor **out);

// Creates a corrupted predictor: the error-free stream with rounds
// corrupted independently at `rate` under `model` (`offset` applies to the
// offset model only).
//
// # Safety
// `trace` must be a live handle and `out` a valid pointer.
enum PsStatus ps_predictor_corrupt(const struct PsTrace *trace,
                                   enum PsNoiseModel model,
                                   double rate,
                                   int64_t offset,
                                   uint64_t seed,
                                   struct PsPredictor **out);

// Releases a predictor handle. Null is ignored.
//
// # Safety
// `predictor` must be null or a handle from this library, not yet freed.
void ps_predictor_free(struct PsPredictor *predictor);

// Computes the accuracy measures of `predictor` against `trace`.
//
// # Safety
// All pointers must be valid; handles must belong to this library.
enum PsStatus ps_metrics(const struct PsTrace *trace,
                         const struct PsPredictor *predictor,
                         struct PsMetrics *out);

// Runs furthest-in-the-future eviction from the default initial cache
// `{1..k}` and fills `*out` with cost, offline optimum, and regret (zero by
// definition here).
//
// # Safety
// `trace` must be a live handle and `out` a valid pointer.
enum PsStatus ps_run_fitf(const struct PsTrace *trace, uint64_t k, struct PsRunStats *out);

// Runs the least-recently-used baseline from the default initial cache.
//
// # Safety
// `trace` must be a live handle and `out` a valid pointer.
enum PsStatus ps_run_lru(const struct PsTrace *trace, uint64_t k, struct PsRunStats *out);

// Runs the exhaustive offline oracle; fails with `PS_STATUS_TOO_LARGE` when
// the instance exceeds the `C(n, k) * T <= 10^7` guard.
//
// # Safety
// `trace` must be a live handle and `out` a valid pointer.
enum PsStatus ps_run_dp_opt(const struct PsTrace *trace, uint64_t k, struct PsRunStats *out);

// Runs the simulated policy following one predictor.
//
// # Safety
// `trace` and `predictor` must be live handles and `out` a valid pointer.
enum PsStatus ps_run_sim(const struct PsTrace *trace,
                         const struct PsPredictor *predictor,
                         uint64_t k,
                         struct PsRunStats *out);

// Runs the epoch-based bandit-access combiner over `m` predictors.
// `tau` of zero selects the default `floor(T^(1/3))`.
//
// # Safety
// `predictors` must point to `m` live predictor handles; `trace` must be a
// live handle and `out` a valid pointer.
enum PsStatus ps_run_scs(const struct PsTrace *trace,
                         const struct PsPredictor *const *predictors,
                         uint64_t m,
                         uint64_t k,
                         uint64_t tau,
                         uint64_t seed,
                         struct PsRunStats *out);

// Runs the full-information multiplexer over `m` predictors; the reported
// cost includes cache-adoption fetches. `epsilon` of zero selects the
// default `min(0.2, sqrt(k ln m / T))`.
//
// # Safety
// `predictors` must point to `m` live predictor handles; `trace` must be a
// live handle and `out` a valid pointer.
enum PsStatus ps_run_multiplexer(const struct PsTrace *trace,
                                 const struct PsPredictor *const *predictors,
                                 uint64_t m,
                                 uint64_t k,
                                 double epsilon,
                                 uint64_t seed,
                                 struct PsRunStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAGESIM_H */
