/* C interface to klpadic: p-adic L-functions via the Bernoulli measure. */

#ifndef KLPADIC_H
#define KLPADIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum KlStatus {
  KL_STATUS_OK = 0,
  KL_STATUS_INVALID_ARGUMENT = 1,
  KL_STATUS_NULL_POINTER = 2,
  KL_STATUS_PRECONDITION = 3,
  KL_STATUS_PRECISION = 4,
  KL_STATUS_PARSE = 5,
  KL_STATUS_IO = 6,
  KL_STATUS_VERIFICATION_FAILED = 7,
  KL_STATUS_PANIC = 8,
} KlStatus;

/**
 * A Dirichlet character with values in the p-adic integers.
 */
typedef struct KlCharacter KlCharacter;

/**
 * A p-adic number of finite precision.
 */
typedef struct KlPadic KlPadic;

/**
 * Inputs shared by [`kl_lp_eval_json`] and [`kl_verify_json`].
 */
typedef struct KlLpParams {
  uint64_t p;
  uint64_t d;
  uint64_t c;
  uint32_t m;
  uint32_t prec;
  uint32_t j_min;
  uint32_t j_max;
  int64_t target;
} KlLpParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null if the last
 * call succeeded. The pointer stays valid until the next call on the same
 * thread and must not be freed.
 */
const char *kl_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library that has not
 * been freed yet.
 */
void kl_string_free(char *s);

/**
 * Builds a character from `triv`, `omega^<k>` or `table:<path>`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a writable pointer.
 */
enum KlStatus kl_character_from_spec(uint64_t p,
                                     const char *spec,
                                     uint32_t prec,
                                     struct KlCharacter **out);

/**
 * # Safety
 * `chi` must be null or a handle from [`kl_character_from_spec`].
 */
void kl_character_free(struct KlCharacter *chi);

/**
 * Writes the conductor as a decimal string.
 *
 * # Safety
 * `chi` must be a live handle and `out` a writable pointer.
 */
enum KlStatus kl_character_conductor(const struct KlCharacter *chi, char **out);

/**
 * Writes the level (the modulus the character is defined at) as a decimal
 * string.
 *
 * # Safety
 * `chi` must be a live handle and `out` a writable pointer.
 */
enum KlStatus kl_character_level(const struct KlCharacter *chi, char **out);

/**
 * # Safety
 * `chi` must be a live handle and `out` a writable pointer.
 */
enum KlStatus kl_character_is_even(const struct KlCharacter *chi, bool *out);

/**
 * Writes `B_n` as a reduced fraction such as `-691/2730`.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum KlStatus kl_bernoulli(uint32_t n, char **out);

/**
 * Writes `{"n", "value", "rational"}` for the generalized Bernoulli number
 * `B_{n,chi}`; `rational` is null unless the character is real.
 *
 * # Safety
 * `chi` must be a live handle and `out` a writable pointer.
 */
enum KlStatus kl_general_bernoulli_json(const struct KlCharacter *chi, uint32_t n, char **out);

/**
 * Evaluates `L_p(s, chi)` at the integer weight `s = k` and writes the
 * evaluation report as JSON.
 *
 * # Safety
 * `params` and `chi` must be valid pointers and `out` a writable pointer.
 */
enum KlStatus kl_lp_eval_json(const struct KlLpParams *params,
                              const struct KlCharacter *chi,
                              uint32_t k,
                              char **out);

/**
 * Compares `L_p(1 - n, chi)` with the special value built from
 * `B_{n, chi omega^{-n}}` and writes the report as JSON. The report is
 * written even when the check fails, in which case the status is
 * `VerificationFailed`.
 *
 * # Safety
 * `params` and `chi` must be valid pointers and `out` a writable pointer.
 */
enum KlStatus kl_verify_json(const struct KlLpParams *params,
                             const struct KlCharacter *chi,
                             uint32_t n,
                             char **out);

/**
 * Embeds `num/den` in Q_p with relative precision `prec`.
 *
 * # Safety
 * `num` and `den` must be NUL-terminated decimal integers and `out` a
 * writable pointer.
 */
enum KlStatus kl_padic_from_rational(uint64_t p,
                                     const char *num,
                                     const char *den,
                                     uint32_t prec,
                                     struct KlPadic **out);

/**
 * # Safety
 * `x` must be null or a handle produced by this library.
 */
void kl_padic_free(struct KlPadic *x);

/**
 * # Safety
 * `a` and `b` must be live handles and `out` a writable pointer.
 */
enum KlStatus kl_padic_add(const struct KlPadic *a, const struct KlPadic *b, struct KlPadic **out);

/**
 * # Safety
 * `a` and `b` must be live handles and `out` a writable pointer.
 */
enum KlStatus kl_padic_mul(const struct KlPadic *a, const struct KlPadic *b, struct KlPadic **out);

/**
 * Writes the valuation. `*exact` is set to false when `x` is zero to its
 * precision, in which case `*out` holds a lower bound. An exact zero
 * reports `INT64_MAX`.
 *
 * # Safety
 * `x` must be a live handle; `out` and `exact` must be writable pointers.
 */
enum KlStatus kl_padic_valuation(const struct KlPadic *x, int64_t *out, bool *exact);

/**
 * Writes the JSON form of `x`.
 *
 * # Safety
 * `x` must be a live handle and `out` a writable pointer.
 */
enum KlStatus kl_padic_to_json(const struct KlPadic *x, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KLPADIC_H */
