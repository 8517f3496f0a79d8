#ifndef TYPICAL_CLT_H
#define TYPICAL_CLT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_ARGUMENT = 1,
  TC_STATUS_DOMAIN = 2,
  TC_STATUS_CONFIG = 3,
  TC_STATUS_INSUFFICIENT_DATA = 4,
  TC_STATUS_UNSUPPORTED = 5,
  TC_STATUS_NUMERIC = 6,
  TC_STATUS_FIT_UNAVAILABLE = 7,
  TC_STATUS_IO = 8,
  TC_STATUS_PANIC = 9,
} TcStatus;

/**
 * Marginal law of √n times one coordinate of a uniform point on the sphere.
 */
typedef struct TcSphereLaw TcSphereLaw;

/**
 * A random vector `X` in `R^n`.
 */
typedef struct TcSystem TcSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message of this thread, without the NUL.
 */
size_t tc_last_error_length(void);

/**
 * Copies the last error message of this thread into `buf` (truncated and
 * NUL-terminated when `cap > 0`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t tc_last_error_message(char *buf, size_t cap);

/**
 * Creates the sphere marginal law for dimension `n >= 2`.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum TcStatus tc_sphere_law_new(size_t n, struct TcSphereLaw **out);

/**
 * # Safety
 * `law` must be null or a handle from [`tc_sphere_law_new`] not yet freed.
 */
void tc_sphere_law_free(struct TcSphereLaw *law);

/**
 * Density `φ_n(x)`.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum TcStatus tc_sphere_law_density(const struct TcSphereLaw *law, double x, double *out);

/**
 * Distribution function `Φ_n(x)`.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum TcStatus tc_sphere_law_cdf(const struct TcSphereLaw *law, double x, double *out);

/**
 * Characteristic function `J_n(t)`.
 *
 * # Safety
 * `law` must be a live handle and `out` writable.
 */
enum TcStatus tc_sphere_law_jn(const struct TcSphereLaw *law, double t, double *out);

/**
 * Creates a system by catalog name (`trigonometric`, `walsh`,
 * `fixed-norm-rademacher`, `gaussian-anisotropic`, `iid-<base>`).
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid handle slot.
 */
enum TcStatus tc_system_new(const char *name, size_t n, struct TcSystem **out);

/**
 * Creates a centered Gaussian system with diagonal covariance `eigenvalues`.
 *
 * # Safety
 * `eigenvalues` must point to `len` readable doubles and `out` be a valid handle slot.
 */
enum TcStatus tc_system_new_gaussian(const double *eigenvalues, size_t len, struct TcSystem **out);

/**
 * # Safety
 * `system` must be null or a handle from a `tc_system_new*` call not yet freed.
 */
void tc_system_free(struct TcSystem *system);

/**
 * Dimension of the system, or 0 for a null handle.
 *
 * # Safety
 * `system` must be null or a live handle.
 */
size_t tc_system_dim(const struct TcSystem *system);

/**
 * Draws `count` values of `⟨X, θ⟩` into `out`. `theta` is normalized first.
 *
 * # Safety
 * `theta` must point to `dim` doubles and `out` to `count` writable doubles.
 */
enum TcStatus tc_system_weighted_sums(const struct TcSystem *system,
                                      const double *theta,
                                      size_t dim,
                                      size_t count,
                                      uint64_t seed,
                                      double *out);

/**
 * Maximal `L^p` norm of `⟨X, θ⟩` over directions. Closed form where known,
 * otherwise a search; `lower_bound` is set when the value comes from a search.
 *
 * # Safety
 * `system` must be a live handle; `value` writable; `lower_bound` null or writable.
 */
enum TcStatus tc_maximal_lp_norm(const struct TcSystem *system,
                                 double p,
                                 uint64_t seed,
                                 double *value,
                                 bool *lower_bound);

/**
 * Kolmogorov distance between the empirical CDF of `samples` and Φ.
 *
 * # Safety
 * `samples` must point to `len` doubles and `out` be writable.
 */
enum TcStatus tc_kolmogorov_to_normal(const double *samples, size_t len, double *out);

/**
 * Mean over `theta_budget` random directions of the Kolmogorov distance from
 * the law of `⟨X, θ⟩` to `target` (`"F"`, `"phi"` or `"G"`).
 *
 * # Safety
 * `system` must be a live handle, `target` NUL-terminated, `mean` writable
 * and `se` null or writable.
 */
enum TcStatus tc_mean_theta_distance(const struct TcSystem *system,
                                     const char *target,
                                     size_t theta_budget,
                                     size_t per_theta,
                                     size_t radial,
                                     uint64_t seed,
                                     double *mean,
                                     double *se);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TYPICAL_CLT_H */
