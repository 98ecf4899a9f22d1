/* C interface to the chartax library.
 *
 * Generated by cbindgen from crates/chartax-ffi; do not edit by hand.
 *
 * Conventions:
 *   - Objects are opaque handles created by *_new and released by the
 *     matching *_free.
 *   - Fallible calls return an int32_t status; CHARTAX_OK is 0. On
 *     failure, chartax_last_error_message() returns a thread-local,
 *     NUL-terminated description valid until the next failing call on
 *     the same thread.
 *   - JSON results are allocated by the library; release them with
 *     chartax_string_free.
 *   - Characters are addressed by enumeration id 0 <= id < phi(D);
 *     id 0 is the principal character.
 */

#ifndef CHARTAX_H
#define CHARTAX_H

#include <stdint.h>

#define CHARTAX_OK 0

#define CHARTAX_ERR_INVALID_ARGUMENT 1

#define CHARTAX_ERR_RESOURCE 2

#define CHARTAX_ERR_NULL_POINTER 3

#define CHARTAX_ERR_PANIC 4

// Support selector for `chartax_theorem1_check_json`.
#define CHARTAX_SUPPORT_FULL 0

#define CHARTAX_SUPPORT_RPOWER 1

// Builtin g selector for `chartax_taxonomy_report_json`.
#define CHARTAX_G_MOEBIUS 0

#define CHARTAX_G_LIOUVILLE 1

#define CHARTAX_G_UNIT 2

#define CHARTAX_G_RANDOM 3

// Opaque character group.
typedef struct ChartaxGroup ChartaxGroup;

// Opaque prime table.
typedef struct ChartaxPrimeTable ChartaxPrimeTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message for this thread (empty string when none).
//
// # Safety
// The pointer is valid until the next failing chartax call on the same
// thread; do not free it.
const char *chartax_last_error_message(void);

// Build a prime/spf table up to `limit`.
//
// # Safety
// `out` must be a valid pointer; on success it receives a handle that
// must be released with `chartax_prime_table_free`.
int chartax_prime_table_new(uint64_t limit, struct ChartaxPrimeTable **out);

// # Safety
// `table` must come from `chartax_prime_table_new` and not be used again.
void chartax_prime_table_free(struct ChartaxPrimeTable *table);

// # Safety
// `table` and `out` must be valid.
int chartax_prime_count(const struct ChartaxPrimeTable *table, uint64_t *out);

// `L = sum_{d < p <= x} 1/p`.
//
// # Safety
// `table` and `out` must be valid.
int chartax_reciprocal_sum(const struct ChartaxPrimeTable *table,
                           uint64_t d,
                           uint64_t x,
                           double *out);

// Build the character group mod `d`.
//
// # Safety
// `out` must be valid; release the handle with `chartax_group_free`.
int chartax_group_new(uint64_t d, struct ChartaxGroup **out);

// # Safety
// `group` must come from `chartax_group_new` and not be used again.
void chartax_group_free(struct ChartaxGroup *group);

// # Safety
// `group` and `out` must be valid.
int chartax_group_phi(const struct ChartaxGroup *group, uint64_t *out);

// Order of the character with enumeration id `chi_id`.
//
// # Safety
// `group` and `out` must be valid.
int chartax_char_order(const struct ChartaxGroup *group, uint64_t chi_id, uint64_t *out);

// chi(n), split into real and imaginary parts.
//
// # Safety
// `group`, `out_re`, `out_im` must be valid.
int chartax_char_eval(const struct ChartaxGroup *group,
                      uint64_t chi_id,
                      uint64_t n,
                      double *out_re,
                      double *out_im);

// Fejér kernel value; `n >= 1`.
//
// # Safety
// `out` must be valid.
int chartax_fejer(uint64_t n, double theta, double *out);

// Distance of `theta` to the nearest integer (pure, infallible).
double chartax_nearest_integer_distance(double theta);

// `sum_{d < p <= x} |1 - chi(p) p^{it}|^2 / p` over the full prime
// window, with `delta_star = raw / L` (NaN when the window is empty).
//
// # Safety
// All pointers must be valid.
int chartax_char_delta_full_window(const struct ChartaxPrimeTable *table,
                                   const struct ChartaxGroup *group,
                                   uint64_t chi_id,
                                   double t,
                                   uint64_t d,
                                   uint64_t x,
                                   double *out_raw,
                                   double *out_delta_star);

// Run the dichotomy check and return the verdict as JSON (release with
// `chartax_string_free`). `support_mode` is `CHARTAX_SUPPORT_FULL` (the
// whole window; `support_param` ignored) or `CHARTAX_SUPPORT_RPOWER`
// (primes that are r-th power residues, `support_param = r`, prime `d`).
//
// # Safety
// All pointers must be valid.
int chartax_theorem1_check_json(const struct ChartaxPrimeTable *table,
                                const struct ChartaxGroup *group,
                                uint64_t chi_id,
                                double t,
                                double b_param,
                                uint64_t d,
                                uint64_t x,
                                int support_mode,
                                uint64_t support_param,
                                char **out_json);

// Full taxonomy report for one instance, as JSON (release with
// `chartax_string_free`). `seed`/`density` are used only for
// `CHARTAX_G_RANDOM`.
//
// # Safety
// All pointers must be valid.
int chartax_taxonomy_report_json(const struct ChartaxPrimeTable *table,
                                 int g_kind,
                                 uint64_t seed,
                                 double density,
                                 uint64_t d,
                                 uint64_t a,
                                 uint64_t x,
                                 double eps,
                                 double b_param,
                                 char **out_json);

// Count of `d^c`-smooth integers in `(sqrt(x), x]` congruent to `a`,
// with the `x/d (log d/log x)^k` bound shape and the ratio.
//
// # Safety
// All pointers must be valid.
int chartax_smooth_count(const struct ChartaxPrimeTable *table,
                         uint64_t x,
                         uint64_t d,
                         double c,
                         uint64_t a,
                         uint32_t k,
                         uint64_t *out_count,
                         double *out_bound,
                         double *out_ratio);

// Release a string returned by a `_json` function.
//
// # Safety
// `s` must come from a chartax `_json` call and not be used again.
void chartax_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHARTAX_H */
