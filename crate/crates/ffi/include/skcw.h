/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef SKCW_H
#define SKCW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SkcwStatus {
  SKCW_STATUS_OK = 0,
  SKCW_STATUS_NULL_POINTER = 1,
  SKCW_STATUS_PRECONDITION = 2,
  SKCW_STATUS_OVERFLOW = 3,
  SKCW_STATUS_BOUND_EXCEEDED = 4,
  SKCW_STATUS_BUDGET_EXCEEDED = 5,
  SKCW_STATUS_REGIME_VIOLATION = 6,
  SKCW_STATUS_DIMENSION_MISMATCH = 7,
  SKCW_STATUS_NON_FINITE = 8,
  SKCW_STATUS_NOT_HOLLOW = 9,
  SKCW_STATUS_PARSE = 10,
  SKCW_STATUS_IO = 11,
  SKCW_STATUS_PANIC = 12,
} SkcwStatus;

// Opaque symmetric matrix.
typedef struct SkcwMatrix SkcwMatrix;

typedef struct SkcwCltTargets {
  double f_limit;
  double f1;
  double alpha1;
} SkcwCltTargets;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into the library on this
// thread.
const char *skcw_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *skcw_version(void);

// Samples an `n x n` symmetric Gaussian matrix from stream `stream_id`
// under `master_seed`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum SkcwStatus skcw_matrix_sample(size_t n,
                                   uint64_t master_seed,
                                   uint64_t stream_id,
                                   bool hollow,
                                   struct SkcwMatrix **out);

// Samples a planted matrix for the spin configuration `signs[0..n]`
// (entries +1 or -1).
//
// # Safety
// `signs` must point to `n` readable bytes and `out` to writable storage
// for one handle.
enum SkcwStatus skcw_matrix_sample_tilted(size_t n,
                                          const int8_t *signs,
                                          double beta,
                                          uint64_t master_seed,
                                          uint64_t stream_id,
                                          struct SkcwMatrix **out);

// Builds a matrix from its upper triangle listed row by row, diagonal
// included (`len = n (n + 1) / 2`).
//
// # Safety
// `upper` must point to `len` readable doubles and `out` to writable
// storage for one handle.
enum SkcwStatus skcw_matrix_from_upper(size_t n,
                                       const double *upper,
                                       size_t len,
                                       struct SkcwMatrix **out);

// Releases a handle; null is ignored.
//
// # Safety
// `m` must be null or a handle from this library not yet freed.
void skcw_matrix_free(struct SkcwMatrix *m);

// Dimension of the matrix, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t skcw_matrix_dim(const struct SkcwMatrix *m);

// # Safety
// `m` must be a live handle and `out` writable.
enum SkcwStatus skcw_matrix_get(const struct SkcwMatrix *m, size_t i, size_t j, double *out);

// Exact `log Z_n(beta)` of the model with couplings `m`.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum SkcwStatus skcw_log_partition(const struct SkcwMatrix *m,
                                   double beta,
                                   double j,
                                   double j_prime,
                                   double *out);

// Signed cycle statistic `C_{n,k}` for `2 <= k <= n`.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum SkcwStatus skcw_signed_cycle(const struct SkcwMatrix *m, size_t k, double *out);

// `Tr P_k(A / sqrt(n))` for a hollow matrix.
//
// # Safety
// `m` must be a live handle and `out` writable.
enum SkcwStatus skcw_chebyshev_lss(const struct SkcwMatrix *m, size_t k, double *out);

// Limit-law parameters of `n (F_n - beta^2)`.
//
// # Safety
// `out` must be writable.
enum SkcwStatus skcw_clt_targets(double beta, double j, double j_prime, struct SkcwCltTargets *out);

// Curie-Weiss normaliser `tau_n(beta J)`.
//
// # Safety
// `out` must be writable.
enum SkcwStatus skcw_curie_weiss_tau(size_t n, double beta_j, double *out);

// # Safety
// `out` must be writable.
enum SkcwStatus skcw_second_moment_target(double beta, double *out);

// `psi_k`: Catalan number `C_{k/2}` for even `k`, zero for odd `k`.
// Fails with `Overflow` when the value does not fit in 64 bits.
//
// # Safety
// `out` must be writable.
enum SkcwStatus skcw_catalan_psi(uint32_t k, int64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKCW_H */
