#ifndef RES_KERNEL_H
#define RES_KERNEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RkStatus {
  RK_STATUS_OK = 0,
  RK_STATUS_PARSE_ERROR = 1,
  RK_STATUS_DRIVER_FAILURE = 2,
  RK_STATUS_BUDGET_EXHAUSTED = 3,
  RK_STATUS_INVALID_ARGUMENT = 4,
  RK_STATUS_INTERNAL = 5,
} RkStatus;

/**
 * Opaque ideal handle.
 */
typedef struct RkIdeal RkIdeal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse an ideal. `vars_csv` is a comma-separated list of variable names and
 * `gens` an array of `n_gens` generator strings.
 *
 * # Safety
 * `vars_csv` and each `gens[i]` must be valid NUL-terminated strings; `out` must
 * be writable.
 */
enum RkStatus rk_ideal_parse(const char *vars_csv,
                             const char *const *gens,
                             size_t n_gens,
                             struct RkIdeal **out);

/**
 * Maximal order of the ideal over all points; `-1` for the zero ideal.
 *
 * # Safety
 * `ideal` must come from [`rk_ideal_parse`]; `out` must be writable.
 */
enum RkStatus rk_ideal_max_order(const struct RkIdeal *ideal, int64_t *out);

/**
 * # Safety
 * `ideal` must come from [`rk_ideal_parse`] and not be used afterwards.
 */
void rk_ideal_free(struct RkIdeal *ideal);

/**
 * Principalize the ideal and return the JSON trace document in `out_json`.
 * `exceptional` is a comma-separated list or null; `budget` 0 means the
 * default. The document is also returned when the status is
 * `DriverFailure` or `BudgetExhausted`.
 *
 * # Safety
 * `ideal` must come from [`rk_ideal_parse`]; `exceptional` must be null or a
 * valid string; `out_json` must be writable.
 */
enum RkStatus rk_principalize(const struct RkIdeal *ideal,
                              const char *exceptional,
                              size_t budget,
                              char **out_json);

/**
 * Re-verify a JSON trace document. `Ok` if accepted, `DriverFailure` if
 * rejected, `ParseError` if malformed.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string.
 */
enum RkStatus rk_check_trace(const char *json);

/**
 * Resolve a 2-dimensional fan given in the text format (`dim 2`, then one
 * cone per line); the resolved fan is returned in the same format.
 *
 * # Safety
 * `fan_text` must be a valid string; `out` must be writable.
 */
enum RkStatus rk_toric_resolve(const char *fan_text, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void rk_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library on this thread.
 */
const char *rk_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RES_KERNEL_H */
