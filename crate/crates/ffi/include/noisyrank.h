/* C interface for the noisyrank library. */

#ifndef NOISYRANK_H
#define NOISYRANK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every entry point.
 */
typedef enum NrStatus {
  NrOk = 0,
  NrInvalidArgument = 1,
  NrIoError = 2,
  NrNullPointer = 3,
  NrInternal = 4,
} NrStatus;

/**
 * Opaque preference-model handle.
 */
typedef struct NrModel NrModel;

/**
 * Model property report with C-friendly booleans (0 or 1).
 */
typedef struct NrModelReport {
  int sst_holds;
  int sti_holds;
  double gamma;
} NrModelReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an adjacent-gap model: every truly stronger element wins with
 * probability `p`.
 */
enum NrStatus nr_model_adjacent_gap(uintptr_t n, double p, struct NrModel **out);

/**
 * Creates a single-gap model: element 1 wins with probability 0.6, all
 * other pairs with probability `0.5 + ptilde`.
 */
enum NrStatus nr_model_single_gap(uintptr_t n, double ptilde, struct NrModel **out);

/**
 * Creates a Mallows model with dispersion `phi` in (0, 1).
 */
enum NrStatus nr_model_mallows(uintptr_t n, double phi, struct NrModel **out);

/**
 * Creates a Bradley-Terry-Luce model from `len` positive weights.
 *
 * # Safety
 * `weights` must point to `len` readable doubles.
 */
enum NrStatus nr_model_btl(const double *weights, uintptr_t len, struct NrModel **out);

/**
 * Loads an explicit probability matrix from a CSV file (n rows of n
 * comma-separated decimals).
 *
 * # Safety
 * `path` must be a valid NUL-terminated string.
 */
enum NrStatus nr_model_matrix_csv(const char *path, struct NrModel **out);

/**
 * Releases a model handle. Passing NULL is a no-op.
 *
 * # Safety
 * `model` must have come from a constructor and not been freed before.
 */
void nr_model_free(struct NrModel *model);

/**
 * Number of elements in the model; 0 for a NULL handle.
 */
uintptr_t nr_model_n(const struct NrModel *model);

/**
 * Checks strong stochastic transitivity and the stochastic triangle
 * inequality over all triples, within slack `tol`.
 */
enum NrStatus nr_verify(const struct NrModel *model, double tol, struct NrModelReport *out);

/**
 * Knockout maximum selection over all model elements. On success `*winner`
 * is the selected element id (1-based) and `*comparisons` the duel count.
 */
enum NrStatus nr_knockout(const struct NrModel *model,
                          double eps,
                          double delta,
                          double gamma,
                          uint64_t seed,
                          uintptr_t *winner,
                          uint64_t *comparisons);

/**
 * Noisy merge-sort ranking of all model elements. `ranking` must hold
 * `len == nr_model_n(model)` slots and is filled ascending by strength.
 *
 * # Safety
 * `ranking` must point to `len` writable `usize` slots.
 */
enum NrStatus nr_merge_rank(const struct NrModel *model,
                            double eps,
                            double delta,
                            uint64_t seed,
                            uintptr_t *ranking,
                            uintptr_t len,
                            uint64_t *comparisons);

/**
 * Binary-search ranking of all model elements. `anchors == 0` uses the
 * `floor(n / (log2 n)^x)` formula; a positive value fixes the anchor
 * count. `ranking` must hold `len == nr_model_n(model)` slots.
 *
 * # Safety
 * `ranking` must point to `len` writable `usize` slots.
 */
enum NrStatus nr_bsr(const struct NrModel *model,
                     double eps,
                     double x,
                     uintptr_t anchors,
                     uint64_t seed,
                     uintptr_t *ranking,
                     uintptr_t len,
                     uint64_t *comparisons);

/**
 * Error of an ordered sequence (ascending strength) under the true model;
 * the sequence is an eps-ranking iff the result is at most eps.
 *
 * # Safety
 * `ranking` must point to `len` readable 1-based element ids.
 */
enum NrStatus nr_eval_err(const struct NrModel *model,
                          const uintptr_t *ranking,
                          uintptr_t len,
                          double *err);

/**
 * True-model check that `element` is within `eps` of the strongest
 * element. `*result` is 1 or 0.
 */
enum NrStatus nr_is_eps_maximum(const struct NrModel *model,
                                uintptr_t element,
                                double eps,
                                int *result);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* NOISYRANK_H */
