#ifndef FCFORGE_H
#define FCFORGE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_NULL_POINTER = 1,
  FC_STATUS_INVALID_UTF8 = 2,
  FC_STATUS_PARSE = 3,
  FC_STATUS_INVALID_ARGUMENT = 4,
  FC_STATUS_UNSUPPORTED = 5,
  FC_STATUS_BUDGET_EXHAUSTED = 6,
  FC_STATUS_PANIC = 7,
} FcStatus;

typedef enum FcVerdictKind {
  FC_VERDICT_KIND_FC_VERIFIED = 0,
  FC_VERDICT_KIND_COUNTEREXAMPLE_FOUND = 1,
  FC_VERDICT_KIND_INCONCLUSIVE = 2,
  FC_VERDICT_KIND_NOT_FC = 3,
} FcVerdictKind;

/**
 * Opaque set family.
 */
typedef struct FcFamily FcFamily;

/**
 * Opaque verification verdict.
 */
typedef struct FcVerdict FcVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on this thread.
 */
const char *fcforge_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fcforge_string_free(char *s);

/**
 * Parses a family in the text format (`n=<int>` then one set per line).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum FcStatus fcforge_family_parse(const char *text, struct FcFamily **out);

/**
 * Parses a generator system and returns the family it generates.
 *
 * # Safety
 * As for `fcforge_family_parse`.
 */
enum FcStatus fcforge_close(const char *gens_text, struct FcFamily **out);

/**
 * # Safety
 * `f` must come from this library and not have been freed. Null is ignored.
 */
void fcforge_family_free(struct FcFamily *f);

/**
 * Number of sets; 0 for null.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
size_t fcforge_family_len(const struct FcFamily *f);

/**
 * Ground-set size; 0 for null.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
size_t fcforge_family_ground(const struct FcFamily *f);

/**
 * Text form of the family.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum FcStatus fcforge_family_to_string(const struct FcFamily *f, char **out);

/**
 * `K_c(A)` as `p/q` text; `weights` is `a,b,…`.
 *
 * # Safety
 * `a` must be a live handle, `weights` NUL-terminated, `out` writable.
 */
enum FcStatus fcforge_k_value(const struct FcFamily *a, const char *weights, char **out);

/**
 * Exhaustive check of `weights` for the base family `b`. `budget` and
 * `threads` of 0 select the defaults.
 *
 * # Safety
 * `b` must be a live handle, `weights` NUL-terminated, `out` writable.
 */
enum FcStatus fcforge_verify(const struct FcFamily *b,
                             const char *weights,
                             uint64_t budget,
                             uint32_t threads,
                             struct FcVerdict **out);

/**
 * # Safety
 * `v` must come from this library and not have been freed. Null is ignored.
 */
void fcforge_verdict_free(struct FcVerdict *v);

/**
 * # Safety
 * `v` must be a live handle; `out` writable.
 */
enum FcStatus fcforge_verdict_kind(const struct FcVerdict *v, enum FcVerdictKind *out);

/**
 * One-line summary of the verdict.
 *
 * # Safety
 * `v` must be a live handle; `out` writable.
 */
enum FcStatus fcforge_verdict_to_string(const struct FcVerdict *v, char **out);

/**
 * The negative family of a `CounterexampleFound` verdict, as a new handle.
 *
 * # Safety
 * `v` must be a live handle; `out` writable.
 */
enum FcStatus fcforge_verdict_family(const struct FcVerdict *v, struct FcFamily **out);

/**
 * Weight search. Writes a certificate line (`FC …` or `NOTFC …`);
 * returns `BudgetExhausted` when the search is inconclusive.
 *
 * # Safety
 * `b` must be a live handle; `out` writable.
 */
enum FcStatus fcforge_find_c(const struct FcFamily *b,
                             uint64_t budget,
                             uint32_t threads,
                             char **out);

/**
 * Farkas certificate from the default probes. `*found` is set to whether
 * one exists; `*out` receives the `NOTFC …` line or null.
 *
 * # Safety
 * `b` must be a live handle; `found` and `out` writable.
 */
enum FcStatus fcforge_prove_not_fc(const struct FcFamily *b, bool *found, char **out);

/**
 * `(2r − n) / C(n−r, w−r)` as `p/q` text.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fcforge_window_contribution(size_t r, size_t n, size_t w, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FCFORGE_H */
