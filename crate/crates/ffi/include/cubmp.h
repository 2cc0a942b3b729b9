#ifndef CUBMP_H
#define CUBMP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Values of the `dims` argument of [`cubmp_compute_pd`].
#define CUBMP_DIMS_ZERO 0

#define CUBMP_DIMS_ONE 1

#define CUBMP_DIMS_BOTH 2

// Values of the `aggregate` argument of [`cubmp_psi_mp`].
#define CUBMP_AGGREGATE_FLATTEN 0

#define CUBMP_AGGREGATE_MEAN 1

typedef enum CubmpStatus {
  CUBMP_STATUS_OK = 0,
  CUBMP_STATUS_NULL_POINTER = 1,
  CUBMP_STATUS_INVALID_ARGUMENT = 2,
  CUBMP_STATUS_SHAPE_MISMATCH = 3,
  CUBMP_STATUS_NOT_MONOTONE = 4,
  CUBMP_STATUS_BUFFER_TOO_SMALL = 5,
  CUBMP_STATUS_INTERNAL = 6,
} CubmpStatus;

// A persistence diagram.
typedef struct CubmpDiagram CubmpDiagram;

// Per-slice diagrams of a compact multifiltration.
typedef struct CubmpSliced CubmpSliced;

// An `M x 2 x q` vectorization with its aggregate.
typedef struct CubmpVectorization CubmpVectorization;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failed call on this thread, or null. Valid
// until the next call into the library from the same thread.
const char *cubmp_last_error(void);

// Library version as a static nul-terminated string.
const char *cubmp_version(void);

// Sublevel persistence diagram of a `height x width` grid. A sentinel is
// chosen above the grid maximum.
//
// # Safety
// `values` must hold `height * width` doubles and `out` must be writable.
enum CubmpStatus cubmp_compute_pd(const double *values,
                                  size_t height,
                                  size_t width,
                                  uint32_t dims,
                                  struct CubmpDiagram **out);

// # Safety
// `diagram` must be null or a handle not yet freed.
void cubmp_diagram_free(struct CubmpDiagram *diagram);

// Number of pairs of dimension `dim` (0 or 1).
//
// # Safety
// `diagram` must be a live handle and `out` writable.
enum CubmpStatus cubmp_diagram_len(const struct CubmpDiagram *diagram, uint32_t dim, size_t *out);

// Copies the births and deaths of dimension `dim` into caller buffers of
// `capacity` entries. Essential deaths are `INFINITY`.
//
// # Safety
// `births` and `deaths` must be writable for `capacity` doubles.
enum CubmpStatus cubmp_diagram_pairs(const struct CubmpDiagram *diagram,
                                     uint32_t dim,
                                     double *births,
                                     double *deaths,
                                     size_t capacity);

// `W_p` between one dimension of two diagrams; `p` may be `INFINITY` for
// the bottleneck distance. Essential pairs are ignored unless
// `clip_essentials` is non-zero, in which case infinite deaths become
// `clip_level`.
//
// # Safety
// Both handles must be live and `out` writable.
enum CubmpStatus cubmp_wasserstein(const struct CubmpDiagram *a,
                                   const struct CubmpDiagram *b,
                                   uint32_t dim,
                                   double p,
                                   int32_t clip_essentials,
                                   double clip_level,
                                   double *out);

// Slices a compact multifiltration given as `num_slices` level grids of
// `height x width`, each level in `0..=num_levels`. Levels must not
// increase from one slice to the next.
//
// # Safety
// `levels` must hold `num_slices * height * width` values.
enum CubmpStatus cubmp_slice_compact(const uint32_t *levels,
                                     size_t num_slices,
                                     size_t height,
                                     size_t width,
                                     uint32_t num_levels,
                                     struct CubmpSliced **out);

// # Safety
// `sliced` must be null or a handle not yet freed.
void cubmp_sliced_free(struct CubmpSliced *sliced);

// # Safety
// `sliced` must be a live handle and `out` writable.
enum CubmpStatus cubmp_sliced_num_slices(const struct CubmpSliced *sliced, size_t *out);

// A copy of the diagram of slice `index`, to be freed with
// [`cubmp_diagram_free`].
//
// # Safety
// `sliced` must be a live handle and `out` writable.
enum CubmpStatus cubmp_sliced_diagram(const struct CubmpSliced *sliced,
                                      size_t index,
                                      struct CubmpDiagram **out);

// Weighted tent vectorization of every slice at the `num_samples` sample
// times, with weight exponent `weight`.
//
// # Safety
// `samples` must hold `num_samples` doubles; handles and `out` as usual.
enum CubmpStatus cubmp_psi_mp(const struct CubmpSliced *sliced,
                              const double *samples,
                              size_t num_samples,
                              double weight,
                              uint32_t aggregate,
                              struct CubmpVectorization **out);

// # Safety
// `v` must be null or a handle not yet freed.
void cubmp_vectorization_free(struct CubmpVectorization *v);

// Writes `[M, 2, q]` to `shape`.
//
// # Safety
// `shape` must be writable for three values.
enum CubmpStatus cubmp_vectorization_shape(const struct CubmpVectorization *v, size_t *shape);

// Copies the row-major `M x 2 x q` values; `len` receives the count even
// when the buffer is too small.
//
// # Safety
// `dst` must be writable for `capacity` doubles and `len` writable.
enum CubmpStatus cubmp_vectorization_values(const struct CubmpVectorization *v,
                                            double *dst,
                                            size_t capacity,
                                            size_t *len);

// Copies the aggregated vector, as [`cubmp_vectorization_values`].
//
// # Safety
// As for [`cubmp_vectorization_values`].
enum CubmpStatus cubmp_vectorization_aggregate(const struct CubmpVectorization *v,
                                               double *dst,
                                               size_t capacity,
                                               size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUBMP_H */
