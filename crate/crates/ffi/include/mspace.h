#ifndef MSPACE_H
#define MSPACE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MspaceSedlock {
  MSPACE_SEDLOCK_NONE = 0,
  MSPACE_SEDLOCK_ALL = 1,
  MSPACE_SEDLOCK_FINITE = 2,
  MSPACE_SEDLOCK_INFINITY = 3,
} MspaceSedlock;

typedef enum MspaceStatus {
  MSPACE_STATUS_OK = 0,
  MSPACE_STATUS_NULL_POINTER = 1,
  MSPACE_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON, unknown names, bad ranges.
   */
  MSPACE_STATUS_INPUT = 3,
  /**
   * Zeros outside the disk, poles on the circle, points off the domain.
   */
  MSPACE_STATUS_DOMAIN = 4,
  MSPACE_STATUS_NO_CONVERGENCE = 5,
  MSPACE_STATUS_SPACE_MISMATCH = 6,
  MSPACE_STATUS_SINGULAR = 7,
  /**
   * A requested certificate or class membership does not hold.
   */
  MSPACE_STATUS_NOT_MEMBER = 8,
  MSPACE_STATUS_BUFFER_TOO_SMALL = 9,
  MSPACE_STATUS_NUMERICAL = 10,
  MSPACE_STATUS_PANIC = 11,
} MspaceStatus;

/**
 * A matrix of a (possibly asymmetric) operator between model spaces.
 */
typedef struct MspaceOperator MspaceOperator;

/**
 * A model space `K_u`.
 */
typedef struct MspaceSpace MspaceSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * failing call on the same thread.
 */
const char *mspace_last_error(void);

const char *mspace_version(void);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void mspace_string_free(char *s);

/**
 * Builds `K_u` for `u = constant * prod b_{a_k}`. `zeros` holds `n_zeros`
 * interleaved (re, im) pairs.
 *
 * # Safety
 * `zeros` must point to `2 * n_zeros` doubles; `out` must be writable.
 */
enum MspaceStatus mspace_space_new(const double *zeros,
                                   size_t n_zeros,
                                   double constant_re,
                                   double constant_im,
                                   struct MspaceSpace **out);

/**
 * Builds `K_u` from `"zN"` or inner-function JSON.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum MspaceStatus mspace_space_parse(const char *spec, struct MspaceSpace **out);

/**
 * # Safety
 * `space` must be a live handle or NULL.
 */
size_t mspace_space_dim(const struct MspaceSpace *space);

/**
 * # Safety
 * `space` must come from this library and not be freed twice.
 */
void mspace_space_free(struct MspaceSpace *space);

/**
 * `A_phi` from `K_u` to `K_v`; `symbol` is rational-symbol JSON.
 *
 * # Safety
 * `u`, `v` live handles, `symbol` NUL-terminated, `out` writable.
 */
enum MspaceStatus mspace_tto_new(const struct MspaceSpace *u,
                                 const struct MspaceSpace *v,
                                 const char *symbol,
                                 struct MspaceOperator **out);

/**
 * `B_phi` from `K_u` to `K_v`.
 *
 * # Safety
 * As for `mspace_tto_new`.
 */
enum MspaceStatus mspace_tho_new(const struct MspaceSpace *u,
                                 const struct MspaceSpace *v,
                                 const char *symbol,
                                 struct MspaceOperator **out);

/**
 * Wraps a row-major matrix of interleaved (re, im) entries as a linear
 * operator from `K_u` to `K_v`.
 *
 * # Safety
 * `entries` must hold `2 * dim(v) * dim(u)` doubles.
 */
enum MspaceStatus mspace_operator_from_entries(const struct MspaceSpace *u,
                                               const struct MspaceSpace *v,
                                               const double *entries,
                                               struct MspaceOperator **out);

/**
 * # Safety
 * `op` must be a live handle or NULL.
 */
size_t mspace_operator_rows(const struct MspaceOperator *op);

/**
 * # Safety
 * `op` must be a live handle or NULL.
 */
size_t mspace_operator_cols(const struct MspaceOperator *op);

/**
 * Copies the matrix row-major as interleaved (re, im) into `buf`, which must
 * hold `2 * rows * cols` doubles.
 *
 * # Safety
 * `buf` must be writable for `len` doubles.
 */
enum MspaceStatus mspace_operator_entries(const struct MspaceOperator *op, double *buf, size_t len);

/**
 * # Safety
 * `op` must come from this library and not be freed twice.
 */
void mspace_operator_free(struct MspaceOperator *op);

/**
 * Truncated Toeplitz membership with its displacement and rebuild residuals.
 *
 * # Safety
 * `op` live; out-pointers writable.
 */
enum MspaceStatus mspace_is_tto(const struct MspaceOperator *op,
                                double tol,
                                bool *member,
                                double *displacement_residual,
                                double *rebuild_residual);

/**
 * Truncated Hankel membership.
 *
 * # Safety
 * `op` live; out-pointers writable.
 */
enum MspaceStatus mspace_is_tho(const struct MspaceOperator *op,
                                double tol,
                                bool *member,
                                double *displacement_residual,
                                double *rebuild_residual);

/**
 * Sedlock class of an endomorphism. `alpha` is written only for
 * `MspaceSedlock::Finite`.
 *
 * # Safety
 * `op` live; out-pointers writable.
 */
enum MspaceStatus mspace_sedlock_class(const struct MspaceOperator *op,
                                       double tol,
                                       enum MspaceSedlock *membership,
                                       double *alpha_re,
                                       double *alpha_im);

/**
 * Clark points (interleaved re, im) and weights for `|alpha| = 1`. Both
 * buffers need `dim(u)` slots (points twice that).
 *
 * # Safety
 * `points` writable for `2 * len` doubles, `weights` for `len`.
 */
enum MspaceStatus mspace_clark(const struct MspaceSpace *space,
                               double alpha_re,
                               double alpha_im,
                               double *points,
                               double *weights,
                               size_t len);

/**
 * Runs the verification suite and returns the JSON report in `report`
 * (free with `mspace_string_free`). `trials = 0` keeps every check's
 * default; `filter` is NULL or a comma-separated list of ids and groups.
 * `passed` tells whether every selected check passed.
 *
 * # Safety
 * `filter` NULL or NUL-terminated; out-pointers writable.
 */
enum MspaceStatus mspace_verify_suite(uint64_t seed,
                                      size_t trials,
                                      const char *filter,
                                      bool *passed,
                                      char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSPACE_H */
