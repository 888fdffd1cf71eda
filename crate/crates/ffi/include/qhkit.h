#ifndef QHKIT_H
#define QHKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes of every fallible call.
 */
typedef enum QhStatus {
  QH_STATUS_OK = 0,
  QH_STATUS_NULL_POINTER = 1,
  QH_STATUS_INVALID_UTF8 = 2,
  QH_STATUS_PARSE = 3,
  QH_STATUS_VALIDATION = 4,
  QH_STATUS_OUTSIDE_DOMAIN = 5,
  QH_STATUS_RESOLUTION = 6,
  QH_STATUS_PATH = 7,
  QH_STATUS_MAP_CONSISTENCY = 8,
  QH_STATUS_SAMPLING = 9,
  QH_STATUS_IO = 10,
  QH_STATUS_PANIC = 11,
} QhStatus;

/**
 * Opaque domain handle.
 */
typedef struct QhDomain QhDomain;

/**
 * Opaque map handle.
 */
typedef struct QhMap QhMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *qh_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qh_version(void);

/**
 * Parses a domain spec. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QhStatus qh_domain_from_json(const char *json, struct QhDomain **out);

/**
 * Releases a domain handle; null is ignored.
 *
 * # Safety
 * `d` must come from this library and not be used afterwards.
 */
void qh_domain_free(struct QhDomain *d);

/**
 * Dimension of the domain, or 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
size_t qh_domain_dim(const struct QhDomain *d);

/**
 * # Safety
 * `p` must point to `dim` doubles and `inside` be a valid pointer.
 */
enum QhStatus qh_contains(const struct QhDomain *d, const double *p, size_t dim, bool *inside);

/**
 * Euclidean distance from an interior point to the boundary.
 *
 * # Safety
 * `p` must point to `dim` doubles and `dist` be a valid pointer.
 */
enum QhStatus qh_dist_to_boundary(const struct QhDomain *d,
                                  const double *p,
                                  size_t dim,
                                  double *dist);

/**
 * # Safety
 * `x` and `y` must each point to `dim` doubles and `value` be valid.
 */
enum QhStatus qh_j_metric(const struct QhDomain *d,
                          const double *x,
                          const double *y,
                          size_t dim,
                          double *value);

/**
 * Lower (j-metric) and upper (graph, at `level`) bounds for the
 * quasihyperbolic distance; `upper_tol` receives the upper bound's
 * quadrature tolerance and may be null.
 *
 * # Safety
 * `x` and `y` must each point to `dim` doubles; `lower` and `upper` must be
 * valid pointers.
 */
enum QhStatus qh_k_bounds(const struct QhDomain *d,
                          const double *x,
                          const double *y,
                          size_t dim,
                          uint32_t level,
                          double *lower,
                          double *upper,
                          double *upper_tol);

/**
 * Parses a map spec (`{"map": {...}}`). On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QhStatus qh_map_from_json(const char *json, struct QhMap **out);

/**
 * Releases a map handle; null is ignored.
 *
 * # Safety
 * `m` must come from this library and not be used afterwards.
 */
void qh_map_free(struct QhMap *m);

/**
 * New handles for the source and target domains of a map. Either output
 * may be null to skip it.
 *
 * # Safety
 * `m` must be a live handle.
 */
enum QhStatus qh_map_domains(const struct QhMap *m,
                             struct QhDomain **source,
                             struct QhDomain **target);

/**
 * Image of a source point; writes `dim` doubles to `out`.
 *
 * # Safety
 * `p` and `out` must each point to `dim` doubles.
 */
enum QhStatus qh_map_forward(const struct QhMap *m, const double *p, size_t dim, double *out);

/**
 * Preimage of a target point; writes `dim` doubles to `out`.
 *
 * # Safety
 * `p` and `out` must each point to `dim` doubles.
 */
enum QhStatus qh_map_inverse(const struct QhMap *m, const double *p, size_t dim, double *out);

/**
 * Estimated quasihyperbolic distortion constant on `pairs` seeded pairs.
 *
 * # Safety
 * `m` must be a live handle and `value` a valid pointer.
 */
enum QhStatus qh_estimate_qh_constant(const struct QhMap *m,
                                      size_t pairs,
                                      uint64_t seed,
                                      uint32_t level,
                                      double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHKIT_H */
