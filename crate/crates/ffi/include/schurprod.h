#ifndef SCHURPROD_H
#define SCHURPROD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_NULL_POINTER = 1,
  SP_STATUS_INVALID_ARGUMENT = 2,
  SP_STATUS_PARSE_ERROR = 3,
  SP_STATUS_BUDGET_EXCEEDED = 4,
  SP_STATUS_DIMENSION_MISMATCH = 5,
  SP_STATUS_SOLVER_ERROR = 6,
  SP_STATUS_UNKNOWN_MOMENTS = 7,
  SP_STATUS_BUFFER_TOO_SMALL = 8,
  SP_STATUS_OVERFLOW = 9,
  SP_STATUS_PANIC = 10,
} SpStatus;

/**
 * Entry laws accepted where a `uint32_t dist` parameter is taken.
 */
enum SpDistribution
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : uint32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  SP_DISTRIBUTION_GAUSSIAN = 0,
  SP_DISTRIBUTION_RADEMACHER = 1,
  SP_DISTRIBUTION_UNIFORM = 2,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum SpDistribution SpDistribution;
#else
typedef uint32_t SpDistribution;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

typedef struct SpLink SpLink;

typedef struct SpProduct SpProduct;

typedef struct SpSpectrumStats {
  size_t n;
  double mean_abs_sq;
  double disk_fraction_1;
  double disk_fraction_1_05;
  double disk_fraction_1_1;
  double radial_ks;
  double angular_max_dev;
  double spectral_radius;
} SpSpectrumStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *sp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sp_version(void);

/**
 * Parses a link name such as `toeplitz`, `linear:2,3,0` or `poly:i^2+j,i+j^2`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SpStatus sp_link_parse(const char *name, struct SpLink **out);

/**
 * # Safety
 * `link` must come from `sp_link_parse` and not be used afterwards. Null is ignored.
 */
void sp_link_free(struct SpLink *link);

/**
 * Writes the coordinates of `L(i, j)` (1-based) into `out[0..cap]`; `written`
 * receives the number of coordinates even when `cap` is too small.
 *
 * # Safety
 * `out` must have room for `cap` values; `link` and `written` must be valid.
 */
enum SpStatus sp_link_eval(const struct SpLink *link,
                           size_t i,
                           size_t j,
                           int64_t *out,
                           size_t cap,
                           size_t *written);

/**
 * Δ_L on `[1,n]²`.
 *
 * # Safety
 * `link` and `out` must be valid pointers.
 */
enum SpStatus sp_link_delta(const struct SpLink *link, size_t n, size_t *out);

/**
 * Whether `(i, j) ↦ (L_X(i,j), L_Y(i,j))` is injective on `[1,n]²`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum SpStatus sp_joint_injective(const struct SpLink *lx,
                                 const struct SpLink *ly,
                                 size_t n,
                                 bool *out);

/**
 * Admissibility of the linear pair `(a i + b j + e, c i + d j + f)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SpStatus sp_linear_admissible(int64_t a, int64_t b, int64_t c, int64_t d, bool *out);

/**
 * Product ensemble `X ⊙ Y`; `dist_x`, `dist_y` are `SpDistribution` codes.
 *
 * # Safety
 * `lx`, `ly` and `out` must be valid pointers; the links are copied.
 */
enum SpStatus sp_product_new(const struct SpLink *lx,
                             const struct SpLink *ly,
                             uint32_t dist_x,
                             uint32_t dist_y,
                             struct SpProduct **out);

/**
 * # Safety
 * `product` must come from `sp_product_new` and not be used afterwards. Null is ignored.
 */
void sp_product_free(struct SpProduct *product);

/**
 * Samples one `n × n` realization into `out` (row-major, `len ≥ n²`).
 *
 * # Safety
 * `out` must have room for `len` doubles.
 */
enum SpStatus sp_product_sample(const struct SpProduct *product,
                                size_t n,
                                uint64_t seed,
                                double *out,
                                size_t len);

/**
 * Limiting *-moment of a circular element for a word over `1` and `*`.
 *
 * # Safety
 * `word` must be NUL-terminated and `out` valid.
 */
enum SpStatus sp_circular_star_moment(const char *word, uint64_t *out);

/**
 * Catalan number `C_m`; 0 when it does not fit in 64 bits.
 */
uint64_t sp_catalan(uint32_t m);

/**
 * Monte-Carlo estimate of `n^{-1-k/2} E tr(M^{ε1}⋯M^{εk})`.
 *
 * # Safety
 * All pointers must be valid; `word` NUL-terminated.
 */
enum SpStatus sp_empirical_star_moment(const struct SpProduct *product,
                                       size_t n,
                                       const char *word,
                                       size_t trials,
                                       uint64_t seed,
                                       double *mean,
                                       double *std_error);

/**
 * `#([π_x]_X ∩ [π_y]_Y)` on `[n]^k`. With `closure` set, tuples whose induced
 * partitions are coarser than `π_x`, `π_y` are counted too. Partitions use the
 * `1,4/2,3` text form.
 *
 * # Safety
 * All pointers must be valid; strings NUL-terminated.
 */
enum SpStatus sp_count_constrained(const struct SpLink *lx,
                                   const struct SpLink *ly,
                                   const char *word,
                                   const char *pi_x,
                                   const char *pi_y,
                                   size_t n,
                                   bool closure,
                                   uint64_t *out);

/**
 * Eigenvalues of a real `n × n` row-major matrix into `re[0..n]`, `im[0..n]`.
 *
 * # Safety
 * `m` must hold `n²` doubles; `re` and `im` room for `n` each.
 */
enum SpStatus sp_eigenvalues(const double *m, size_t n, double *re, double *im);

/**
 * Spectral statistics of the spectrum of `scale · m` for a real row-major matrix.
 *
 * # Safety
 * `m` must hold `n²` doubles and `out` be valid.
 */
enum SpStatus sp_spectrum_stats(const double *m,
                                size_t n,
                                double scale,
                                struct SpSpectrumStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHURPROD_H */
