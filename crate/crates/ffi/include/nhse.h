#ifndef NHSE_H
#define NHSE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NhseBoundary {
  NHSE_BOUNDARY_OPEN = 0,
  NHSE_BOUNDARY_PERIODIC = 1,
} NhseBoundary;

typedef enum NhseStatus {
  NHSE_STATUS_OK = 0,
  NHSE_STATUS_CONFIG_ERROR = 1,
  NHSE_STATUS_NUMERICAL_ERROR = 2,
  NHSE_STATUS_IO_ERROR = 3,
  NHSE_STATUS_NULL_POINTER = 4,
  NHSE_STATUS_INVALID_ARGUMENT = 5,
  NHSE_STATUS_PANIC = 6,
} NhseStatus;

typedef enum NhseVerdict {
  NHSE_VERDICT_BLOCKED = 0,
  NHSE_VERDICT_EXPECTED = 1,
  NHSE_VERDICT_INAPPLICABLE_REDUCIBLE = 2,
  NHSE_VERDICT_NO_SYMMETRY_FOUND = 3,
} NhseVerdict;

typedef enum NhseBand {
  NHSE_BAND_PLUS = 0,
  NHSE_BAND_MINUS = 1,
} NhseBand;

typedef enum NhseVariant {
  NHSE_VARIANT_REDERIVED = 0,
  NHSE_VARIANT_AS_PRINTED = 1,
  NHSE_VARIANT_DROP_LEADING_ONE = 2,
} NhseVariant;

/**
 * Opaque validated model.
 */
typedef struct NhseModel NhseModel;

/**
 * Opaque eigenvalue list, sorted by real then imaginary part.
 */
typedef struct NhseSpectrum NhseSpectrum;

/**
 * Model parameters. `v` is the potential strength, `num_sites` the chain length.
 */
typedef struct NhseParams {
  double t;
  double gamma;
  double delta;
  double v;
  double theta;
  size_t num_sites;
  enum NhseBoundary boundary;
} NhseParams;

typedef struct NhseComplex {
  double re;
  double im;
} NhseComplex;

typedef struct NhseSkin {
  double skew;
  double accumulation;
  size_t edge_states;
  bool skin_detected;
} NhseSkin;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or an empty string.
 * The pointer stays valid until the next call on the same thread.
 */
const char *nhse_last_error_message(void);

/**
 * Defaults: t = 1, gamma = 1.5, delta = 0.5, no potential, 100 open sites.
 */
struct NhseParams nhse_params_default(void);

/**
 * # Safety
 * `params` must point to a valid `NhseParams`, `model` to writable storage.
 */
enum NhseStatus nhse_model_new(const struct NhseParams *params, struct NhseModel **model);

/**
 * # Safety
 * `model` must come from `nhse_model_new` and not be freed twice. Null is ignored.
 */
void nhse_model_free(struct NhseModel *model);

/**
 * Eigenvalues of the BdG matrix.
 *
 * # Safety
 * `model` must be a live handle, `spectrum` writable.
 */
enum NhseStatus nhse_spectrum_new(const struct NhseModel *model, struct NhseSpectrum **spectrum);

/**
 * # Safety
 * `spectrum` must be a live handle or null.
 */
size_t nhse_spectrum_len(const struct NhseSpectrum *spectrum);

/**
 * # Safety
 * `spectrum` must be a live handle, `value` writable.
 */
enum NhseStatus nhse_spectrum_get(const struct NhseSpectrum *spectrum,
                                  size_t index,
                                  struct NhseComplex *value);

/**
 * # Safety
 * `spectrum` must come from `nhse_spectrum_new` and not be freed twice. Null is ignored.
 */
void nhse_spectrum_free(struct NhseSpectrum *spectrum);

/**
 * Symmetry verdict over the default candidate set. `residual` receives NaN
 * when no candidate has reflection structure.
 *
 * # Safety
 * `model` must be a live handle; `verdict` and `residual` writable.
 */
enum NhseStatus nhse_model_verdict(const struct NhseModel *model,
                                   double tol,
                                   enum NhseVerdict *verdict,
                                   double *residual);

/**
 * Skin metrics of all BdG eigenstates.
 *
 * # Safety
 * `model` must be a live handle, `skin` writable.
 */
enum NhseStatus nhse_model_skin(const struct NhseModel *model,
                                size_t ell,
                                double w_edge,
                                double tau_skin,
                                struct NhseSkin *skin);

/**
 * The four roots at `energy`, ordered (1+, 1-, 2-, 2+).
 *
 * # Safety
 * `model` must be a live handle, `roots` must hold 4 values.
 */
enum NhseStatus nhse_solve_beta(const struct NhseModel *model,
                                struct NhseComplex energy,
                                struct NhseComplex *roots);

/**
 * # Safety
 * `model` must be a live handle, `phase` writable.
 */
enum NhseStatus nhse_zak_phase(const struct NhseModel *model,
                               enum NhseBand band,
                               size_t grid,
                               double *phase);

/**
 * Normalized boundary determinant of a `sites`-long open chain at `energy`.
 *
 * # Safety
 * `model` must be a live handle, `det` writable.
 */
enum NhseStatus nhse_boundary_determinant(const struct NhseModel *model,
                                          struct NhseComplex energy,
                                          size_t sites,
                                          enum NhseVariant variant,
                                          struct NhseComplex *det);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NHSE_H */
