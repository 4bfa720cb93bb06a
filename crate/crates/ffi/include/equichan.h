#ifndef EQUICHAN_H
#define EQUICHAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by all functions.
 */
typedef enum EqStatus {
  EQ_STATUS_OK = 0,
  EQ_STATUS_NULL_POINTER = 1,
  EQ_STATUS_INVALID_ARGUMENT = 2,
  EQ_STATUS_DIMENSION_MISMATCH = 3,
  EQ_STATUS_NOT_HERMITIAN = 4,
  EQ_STATUS_UNSUPPORTED = 5,
  EQ_STATUS_INVALID_JSON = 6,
  EQ_STATUS_PANIC = 7,
} EqStatus;

/**
 * Opaque channel handle.
 */
typedef struct EqChannel EqChannel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *eq_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void eq_string_free(char *s);

/**
 * Parses parameter JSON (`{"family": "U" | "DU" | "PROD", ...}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum EqStatus eq_channel_from_json(const char *json, struct EqChannel **out);

/**
 * Unital U(n) channel `X ↦ ((1 − λ)/n)·tr(X)·I + λX`.
 *
 * # Safety
 * `out` must be writable.
 */
enum EqStatus eq_channel_new_unitary(size_t n, double lambda, struct EqChannel **out);

/**
 * Unital DU(2) channel with leakages `c12`, `c21` and coherence `λ`.
 *
 * # Safety
 * `out` must be writable.
 */
enum EqStatus eq_channel_new_du2(double c12,
                                 double c21,
                                 double lambda_re,
                                 double lambda_im,
                                 struct EqChannel **out);

/**
 * Permutation-symmetric DU(3) channel with diagonal weight `p` and coherence `λ`.
 *
 * # Safety
 * `out` must be writable.
 */
enum EqStatus eq_channel_new_du3_symmetric(double p,
                                           double lambda_re,
                                           double lambda_im,
                                           struct EqChannel **out);

/**
 * Unital product channel on `C^n1 ⊗ C^n2` with `λ00 = 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum EqStatus eq_channel_new_product(size_t n1,
                                     size_t n2,
                                     double l01,
                                     double l10,
                                     double l11,
                                     struct EqChannel **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `ch` must come from this library and not have been freed.
 */
void eq_channel_free(struct EqChannel *ch);

/**
 * Matrix size `n` of the channel's input and output, or 0 for a null handle.
 *
 * # Safety
 * `ch` must be null or a live handle.
 */
size_t eq_channel_dim(const struct EqChannel *ch);

/**
 * `Y = Φ(X)` for `n x n` matrices given as row-major real/imaginary arrays of length `n*n`.
 *
 * # Safety
 * All buffers must hold `n*n` doubles, where `n = eq_channel_dim(ch)`.
 */
enum EqStatus eq_channel_apply(const struct EqChannel *ch,
                               const double *x_re,
                               const double *x_im,
                               double *y_re,
                               double *y_im);

/**
 * Choi matrix (size `n² x n²`) into row-major buffers of length `len`.
 *
 * # Safety
 * Both buffers must hold `len` doubles.
 */
enum EqStatus eq_channel_choi(const struct EqChannel *ch, double *re, double *im, size_t len);

/**
 * New handle for `outer ∘ inner` (inner acts first).
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum EqStatus eq_channel_compose(const struct EqChannel *outer,
                                 const struct EqChannel *inner,
                                 struct EqChannel **out);

/**
 * Full classification report as JSON.
 *
 * # Safety
 * `ch` must be live; `out` must be writable. Free the result with `eq_string_free`.
 */
enum EqStatus eq_channel_classify_json(const struct EqChannel *ch,
                                       double eig_zero,
                                       double herm_sym,
                                       char **out);

/**
 * Parameter JSON accepted by `eq_channel_from_json`.
 *
 * # Safety
 * `ch` must be live; `out` must be writable. Free the result with `eq_string_free`.
 */
enum EqStatus eq_channel_to_json(const struct EqChannel *ch, char **out);

/**
 * Smallest eigenvalue of `Φ(X†X) − Φ(X)†Φ(X)` with default tolerances.
 *
 * # Safety
 * Input buffers must hold `n*n` doubles; `gap` must be writable.
 */
enum EqStatus eq_channel_kadison_gap(const struct EqChannel *ch,
                                     const double *x_re,
                                     const double *x_im,
                                     double *gap);

/**
 * Searches for a Schwarz violation. Sets `*found` to 1 and `*gap` to the violating gap when
 * one is found; otherwise `*found = 0` and `*gap` is untouched.
 *
 * # Safety
 * `ch` must be live; `found` and `gap` must be writable.
 */
enum EqStatus eq_channel_schwarz_falsify(const struct EqChannel *ch,
                                         size_t budget,
                                         uint64_t seed,
                                         int *found,
                                         double *gap);

/**
 * Schwarz region of unital U(n) maps: `λ ∈ [−1/n, 1]`.
 *
 * # Safety
 * `member` and `margin` must be writable.
 */
enum EqStatus eq_verdict_schwarz_u(size_t n, double lambda, int *member, double *margin);

/**
 * CP region of unital U(n) maps: `λ ∈ [−1/(n²−1), 1]`.
 *
 * # Safety
 * `member` and `margin` must be writable.
 */
enum EqStatus eq_verdict_cp_u(size_t n, double lambda, int *member, double *margin);

/**
 * Partial-transpose region of unital U(n) maps: `λ ∈ [−1/(n−1), 1/(n+1)]`.
 *
 * # Safety
 * `member` and `margin` must be writable.
 */
enum EqStatus eq_verdict_ppt_eb_u(size_t n, double lambda, int *member, double *margin);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQUICHAN_H */
