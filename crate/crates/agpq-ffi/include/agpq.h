#ifndef AGPQ_H
#define AGPQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum AgpqStatus {
  AgpqStatus_Ok = 0,
  AgpqStatus_NullPointer = 1,
  AgpqStatus_InvalidArgument = 2,
  AgpqStatus_ConvergenceFailure = 3,
  AgpqStatus_DimensionLimit = 4,
  AgpqStatus_InternalError = 5,
} AgpqStatus;

/**
 * Opaque geminal-coefficient handle.
 */
typedef struct AgpqGeminals AgpqGeminals;

/**
 * Opaque pairing-model handle.
 */
typedef struct AgpqModel AgpqModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message (UTF-8, NUL-terminated) into
 * `buf`; returns the full message length in bytes, excluding the NUL.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (query mode).
 */
uintptr_t agpq_last_error_message(char *buf, uintptr_t len);

/**
 * Creates a pairing model with levels eps_p = p * delta_eps, coupling
 * `g`, and `n` pairs on `m` levels. On success writes the handle to
 * `out`; free with `agpq_model_free`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AgpqStatus agpq_model_new(uintptr_t m,
                               uintptr_t n,
                               double delta_eps,
                               double g,
                               struct AgpqModel **out);

/**
 * Releases a model handle; null is a no-op.
 *
 * # Safety
 * `model` must come from `agpq_model_new` and not be freed twice.
 */
void agpq_model_free(struct AgpqModel *model);

/**
 * Mean-field (uncorrelated) reference energy.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum AgpqStatus agpq_hf_energy(const struct AgpqModel *model, double *out);

/**
 * Critical coupling where the mean field first develops a gap.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum AgpqStatus agpq_critical_g(const struct AgpqModel *model, double *out);

/**
 * Exact (seniority-zero full CI) ground-state energy.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum AgpqStatus agpq_exact_ground_energy(const struct AgpqModel *model, double *out);

/**
 * Optimizes the geminal coefficients classically; writes a handle to
 * `out`, freed with `agpq_geminals_free`.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum AgpqStatus agpq_optimize_agp(const struct AgpqModel *model, struct AgpqGeminals **out);

/**
 * Releases a geminal handle; null is a no-op.
 *
 * # Safety
 * `geminals` must come from `agpq_optimize_agp` and not be freed twice.
 */
void agpq_geminals_free(struct AgpqGeminals *geminals);

/**
 * Copies the geminal coefficients into `buf` (capacity `len`); returns
 * the level count via the function result semantics of
 * `agpq_last_error_message` (full length, truncated copy).
 *
 * # Safety
 * `geminals` must be valid; `buf` must point to `len` doubles or be null.
 */
uintptr_t agpq_geminals_eta(const struct AgpqGeminals *geminals, double *buf, uintptr_t len);

/**
 * Variational AGP energy of the given geminals under the model.
 *
 * # Safety
 * All pointers must be valid.
 */
enum AgpqStatus agpq_agp_energy(const struct AgpqGeminals *geminals,
                                const struct AgpqModel *model,
                                double *out);

/**
 * Runs the projected VQE over the pair-hopper angles starting from the
 * given geminals. Writes the optimized energy and, optionally, the
 * iteration count.
 *
 * # Safety
 * `geminals`, `model`, and `out_energy` must be valid pointers;
 * `out_iterations` may be null.
 */
enum AgpqStatus agpq_vqe_minimize(const struct AgpqGeminals *geminals,
                                  const struct AgpqModel *model,
                                  uintptr_t restarts,
                                  uint64_t seed,
                                  double *out_energy,
                                  uintptr_t *out_iterations);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AGPQ_H */
