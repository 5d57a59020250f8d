#ifndef BMX_H
#define BMX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum BmxStatus {
  BMX_STATUS_OK = 0,
  BMX_STATUS_NULL_POINTER = 1,
  BMX_STATUS_SHAPE = 2,
  BMX_STATUS_NOT_CUBIC = 3,
  BMX_STATUS_NOT_SQUARE = 4,
  BMX_STATUS_SINGULAR_FIBER = 5,
  BMX_STATUS_DEGENERATE_FAMILY = 6,
  BMX_STATUS_SINGULAR_SYSTEM = 7,
  BMX_STATUS_NO_BRANCH = 8,
  BMX_STATUS_INVALID_PARAMETER = 9,
  BMX_STATUS_PRECONDITION = 10,
  BMX_STATUS_SIZE_GUARD = 11,
  BMX_STATUS_DOCUMENT = 12,
  BMX_STATUS_UTF8 = 13,
  BMX_STATUS_PANIC = 99,
} BmxStatus;

/**
 * Opaque third-order hypermatrix with complex entries.
 */
typedef struct BmxHypermatrix BmxHypermatrix;

/**
 * Opaque result of the 2×2×2 symmetrization SVD.
 */
typedef struct BmxSvd3 BmxSvd3;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bmx_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bmx_version(void);

/**
 * Creates a hypermatrix from row-major real and imaginary parts.
 * `im` may be null for a real hypermatrix.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `n0*n1*n2` doubles; `out` must be writable.
 */
enum BmxStatus bmx_hypermatrix_new(size_t n0,
                                   size_t n1,
                                   size_t n2,
                                   const double *re,
                                   const double *im,
                                   struct BmxHypermatrix **out);

/**
 * Releases a hypermatrix. Null is ignored.
 *
 * # Safety
 * `h` must come from this library and not be freed twice.
 */
void bmx_hypermatrix_free(struct BmxHypermatrix *h);

/**
 * Writes the three side lengths into `shape`.
 *
 * # Safety
 * `shape` must point to three writable `size_t`.
 */
enum BmxStatus bmx_hypermatrix_shape(const struct BmxHypermatrix *h, size_t *shape);

/**
 * Copies the row-major entries into `re` and `im` (either may be null).
 * `len` is the capacity of each buffer and must be at least the entry count.
 *
 * # Safety
 * Non-null buffers must hold `len` writable doubles.
 */
enum BmxStatus bmx_hypermatrix_entries(const struct BmxHypermatrix *h,
                                       double *re,
                                       double *im,
                                       size_t len);

/**
 * Ternary product of three conformable hypermatrices.
 *
 * # Safety
 * Handles must be valid; `out` must be writable.
 */
enum BmxStatus bmx_prod3(const struct BmxHypermatrix *a,
                         const struct BmxHypermatrix *b,
                         const struct BmxHypermatrix *c,
                         struct BmxHypermatrix **out);

/**
 * Cyclic transpose applied `power` times.
 *
 * # Safety
 * `h` must be valid; `out` must be writable.
 */
enum BmxStatus bmx_transpose(const struct BmxHypermatrix *h,
                             size_t power,
                             struct BmxHypermatrix **out);

/**
 * Orthogonality check. Writes the verdict and the residual.
 *
 * # Safety
 * `h` must be valid; `passed` and `residual` must be writable.
 */
enum BmxStatus bmx_is_orthogonal(const struct BmxHypermatrix *h,
                                 double tol,
                                 bool *passed,
                                 double *residual);

/**
 * Parses a JSON hypermatrix document (order 3).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BmxStatus bmx_hypermatrix_from_json(const char *json, struct BmxHypermatrix **out);

/**
 * Serializes a hypermatrix as a JSON document. Release the string with
 * [`bmx_string_free`].
 *
 * # Safety
 * `h` must be valid; `out` must be writable.
 */
enum BmxStatus bmx_hypermatrix_to_json(const struct BmxHypermatrix *h, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void bmx_string_free(char *s);

/**
 * Symmetrization SVD of a 2×2×2 hypermatrix. When `has_gauge` is false the
 * gauge is chosen automatically.
 *
 * # Safety
 * `a` must be valid; `out` must be writable.
 */
enum BmxStatus bmx_svd3(const struct BmxHypermatrix *a,
                        bool has_gauge,
                        double gauge_re,
                        double gauge_im,
                        struct BmxSvd3 **out);

/**
 * Releases a decomposition. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void bmx_svd3_free(struct BmxSvd3 *s);

/**
 * Copies factor `which` (0 = Ũ, 1 = Ṽ, 2 = W̃) into a new hypermatrix.
 *
 * # Safety
 * `s` must be valid; `out` must be writable.
 */
enum BmxStatus bmx_svd3_factor(const struct BmxSvd3 *s,
                               uint32_t which,
                               struct BmxHypermatrix **out);

/**
 * Copies the eight coefficients, indexed `4i + 2j + k`.
 *
 * # Safety
 * `re` and `im` must each hold eight writable doubles.
 */
enum BmxStatus bmx_svd3_sigma(const struct BmxSvd3 *s, double *re, double *im);

/**
 * Characteristic, spectral and reconstruction residuals.
 *
 * # Safety
 * `residuals` must hold three writable doubles.
 */
enum BmxStatus bmx_svd3_residuals(const struct BmxSvd3 *s, double *residuals);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BMX_H */
