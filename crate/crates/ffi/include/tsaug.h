#ifndef TSAUG_H
#define TSAUG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Values 2 to 4 match the CLI exit codes.
 */
typedef enum TsaugStatus {
  TSAUG_STATUS_OK = 0,
  TSAUG_STATUS_UNKNOWN_METHOD = 2,
  TSAUG_STATUS_IO = 3,
  TSAUG_STATUS_INVALID_ARGUMENT = 4,
  TSAUG_STATUS_NULL_POINTER = 6,
  TSAUG_STATUS_OUT_OF_RANGE = 7,
  TSAUG_STATUS_PANIC = 8,
} TsaugStatus;

/**
 * Opaque labelled dataset. Create with [`tsaug_dataset_load`] or
 * [`tsaug_expand`]; release with [`tsaug_dataset_free`].
 */
typedef struct TsaugDataset TsaugDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on the calling thread, or an empty
 * string. Valid until the next `tsaug_*` call on the same thread.
 */
const char *tsaug_last_error(void);

/**
 * Number of registered methods, including the `none` baseline.
 */
size_t tsaug_method_count(void);

/**
 * Static NUL-terminated id of method `index`, or NULL when out of range.
 */
const char *tsaug_method_name(size_t index);

/**
 * Loads a UCR-format file into a new handle stored in `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TsaugStatus tsaug_dataset_load(const char *path, struct TsaugDataset **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `dataset` must come from this library and not have been freed.
 */
void tsaug_dataset_free(struct TsaugDataset *dataset);

/**
 * Number of series in the dataset; 0 for NULL.
 *
 * # Safety
 * `dataset` must be NULL or a live handle.
 */
size_t tsaug_dataset_len(const struct TsaugDataset *dataset);

/**
 * Length of series `index` in `*out_len`.
 *
 * # Safety
 * `dataset` must be a live handle and `out_len` a valid pointer.
 */
enum TsaugStatus tsaug_dataset_series_len(const struct TsaugDataset *dataset,
                                          size_t index,
                                          size_t *out_len);

/**
 * Copies series `index` into `buf`, which must hold at least its length.
 *
 * # Safety
 * `buf` must be valid for `capacity` writes.
 */
enum TsaugStatus tsaug_dataset_series(const struct TsaugDataset *dataset,
                                      size_t index,
                                      double *buf,
                                      size_t capacity);

/**
 * Label of series `index` as a string owned by the handle, or NULL.
 *
 * # Safety
 * `dataset` must be NULL or a live handle.
 */
const char *tsaug_dataset_label(const struct TsaugDataset *dataset, size_t index);

/**
 * Rescales `train` to [-1, 1] using its own range and zeroes missing
 * values. `test`, when not NULL, is rescaled with the same train range.
 *
 * # Safety
 * `train` must be a live handle; `test` NULL or a different live handle.
 */
enum TsaugStatus tsaug_dataset_normalize(struct TsaugDataset *train, struct TsaugDataset *test);

/**
 * Expands `train` with `method`, storing a new handle in `*out`.
 * `params` holds `key=value` pairs separated by `;` and may be NULL.
 * `jobs` = 0 uses every core; the output does not depend on it.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be valid.
 */
enum TsaugStatus tsaug_expand(const struct TsaugDataset *train,
                              const char *method,
                              size_t factor,
                              uint64_t seed,
                              const char *params,
                              size_t jobs,
                              struct TsaugDataset **out);

/**
 * Writes the dataset in UCR tab-separated format.
 *
 * # Safety
 * `path` must be NUL-terminated.
 */
enum TsaugStatus tsaug_dataset_write(const struct TsaugDataset *dataset, const char *path);

/**
 * Banded DTW distance (squared local cost). `window_fraction` = 1 is
 * unconstrained.
 *
 * # Safety
 * `x` and `y` must be valid for `nx` and `ny` reads; `out` must be valid.
 */
enum TsaugStatus tsaug_dtw_distance(const double *x,
                                    size_t nx,
                                    const double *y,
                                    size_t ny,
                                    double window_fraction,
                                    double *out);

/**
 * 1-NN accuracy of `test` against `train`. A negative `window_fraction`
 * selects Euclidean distance; otherwise banded DTW.
 *
 * # Safety
 * Both handles must be live; `out` must be valid.
 */
enum TsaugStatus tsaug_knn1_accuracy(const struct TsaugDataset *train,
                                     const struct TsaugDataset *test,
                                     double window_fraction,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSAUG_H */
