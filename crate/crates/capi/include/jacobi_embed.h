#ifndef JACOBI_EMBED_H
#define JACOBI_EMBED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum JeStatus {
  JeOk = 0,
  JeErrInvalidArgument = 1,
  JeErrParse = 2,
  JeErrNotElliptic = 3,
  JeErrObstruction = 4,
  JeErrDomain = 5,
  JeErrInternal = 6,
} JeStatus;

/**
 * Opaque result of one embedding run.
 */
typedef struct JeEmbedding JeEmbedding;

/**
 * Opaque periodic Jacobi operator.
 */
typedef struct JeOperator JeOperator;

/**
 * Key verification figures for an embedding run.
 */
typedef struct JeVerification {
  double max_interior_residual;
  double first_row_residual;
  double spectral_distance;
  double residual_bound;
  double eigvec_correlation;
  double decay_exponent_fit;
  double decay_exponent_expected;
  double wronskian_drift;
} JeVerification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. Borrowed;
 * overwritten by the next failing call.
 */
const char *je_last_error_message(void);

/**
 * Parse an operator from its JSON description
 * `{"a": [...], "b": [...]}` (entries numbers or "p/q" strings).
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be writable.
 */
enum JeStatus je_operator_from_json(const char *json, struct JeOperator **out);

/**
 * # Safety
 * `op` must come from `je_operator_from_json` and not be freed twice.
 */
void je_operator_free(struct JeOperator *op);

/**
 * # Safety
 * `op` must be a live operator handle.
 */
uintptr_t je_operator_period(const struct JeOperator *op);

/**
 * Spectral bands: writes up to `cap` pairs (lo, hi) into `edges` and the
 * total band count into `n_bands`. `degenerate` (optional) receives 1 when
 * bands touch or a band edge is a multiple discriminant root.
 *
 * # Safety
 * `edges` must have room for `2 * cap` doubles; out pointers writable.
 */
enum JeStatus je_band_structure(const struct JeOperator *op,
                                double *edges,
                                uintptr_t cap,
                                uintptr_t *n_bands,
                                int32_t *degenerate);

/**
 * Value of the embeddability function at an elliptic point.
 *
 * # Safety
 * `op` live handle, `out` writable.
 */
enum JeStatus je_c_eval(const struct JeOperator *op, double lambda, double *out);

/**
 * Run the embedding construction and its verification.
 *
 * # Safety
 * `op` live handle, `out` writable.
 */
enum JeStatus je_embed(const struct JeOperator *op,
                       double lambda,
                       double alpha,
                       uintptr_t n,
                       double tail_tol,
                       struct JeEmbedding **out);

/**
 * # Safety
 * `e` must come from `je_embed` and not be freed twice.
 */
void je_embedding_free(struct JeEmbedding *e);

/**
 * Number of sites in the constructed sequences.
 *
 * # Safety
 * `e` live handle.
 */
uintptr_t je_embedding_len(const struct JeEmbedding *e);

/**
 * Candidate eigenvector u_1..u_N; borrowed from the handle.
 *
 * # Safety
 * `e` live handle; pointer valid until `je_embedding_free`.
 */
const double *je_embedding_u(const struct JeEmbedding *e);

/**
 * Perturbation q_1..q_N; borrowed from the handle.
 *
 * # Safety
 * `e` live handle; pointer valid until `je_embedding_free`.
 */
const double *je_embedding_q(const struct JeEmbedding *e);

/**
 * Tail sums omega_1..omega_N; borrowed from the handle.
 *
 * # Safety
 * `e` live handle; pointer valid until `je_embedding_free`.
 */
const double *je_embedding_omega(const struct JeEmbedding *e);

/**
 * # Safety
 * `e` live handle, `out` writable.
 */
enum JeStatus je_embedding_verification(const struct JeEmbedding *e, struct JeVerification *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JACOBI_EMBED_H */
