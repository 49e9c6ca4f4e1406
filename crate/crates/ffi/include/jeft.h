#ifndef JEFT_H
#define JEFT_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum JeftStatus {
  JEFT_STATUS_OK = 0,
  JEFT_STATUS_NULL_POINTER = 1,
  JEFT_STATUS_DOMAIN = 2,
  JEFT_STATUS_SIZE = 3,
  JEFT_STATUS_NOT_RADIAL = 4,
  JEFT_STATUS_STENCIL_OUT_OF_DOMAIN = 5,
  JEFT_STATUS_CONFIG = 6,
  JEFT_STATUS_IO = 7,
  JEFT_STATUS_PANIC = 8,
} JeftStatus;

typedef enum JeftModel {
  JEFT_MODEL_H2 = 2,
  JEFT_MODEL_H3 = 3,
} JeftModel;

typedef enum JeftMethod {
  JEFT_METHOD_DIRECT = 0,
  JEFT_METHOD_COMPOSED = 1,
} JeftMethod;

// Test-function handle.
typedef struct JeftFunction JeftFunction;

// Quadrature grid handle.
typedef struct JeftGrid JeftGrid;

typedef struct JeftComplex {
  double re;
  double im;
} JeftComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *jeft_last_error(void);

// Library version as a static string.
const char *jeft_version(void);

// Grid with default node counts.
//
// # Safety
// `out` must be valid for writes.
enum JeftStatus jeft_grid_new(enum JeftModel model,
                              double radius,
                              double lambda_max,
                              struct JeftGrid **out);

// Grid with explicit node counts; zero keeps the default. `nb_polar` is the
// circle size in `H2`; `nb_azimuth` is ignored there.
//
// # Safety
// `out` must be valid for writes.
enum JeftStatus jeft_grid_new_sized(enum JeftModel model,
                                    double radius,
                                    double lambda_max,
                                    uintptr_t nr,
                                    uintptr_t nb_polar,
                                    uintptr_t nb_azimuth,
                                    uintptr_t nlambda,
                                    struct JeftGrid **out);

// # Safety
// `grid` must come from `jeft_grid_new*` and not be used afterwards.
void jeft_grid_free(struct JeftGrid *grid);

// Suite member `index` (0 to 4) scaled to the grid's radius.
//
// # Safety
// `grid` must be a live handle and `out` valid for writes.
enum JeftStatus jeft_function_suite(const struct JeftGrid *grid,
                                    uintptr_t index,
                                    struct JeftFunction **out);

// Flat bump of the given support and amplitude about `center`.
//
// # Safety
// `grid` must be a live handle, `center` must hold `dim` doubles and `out`
// must be valid for writes.
enum JeftStatus jeft_function_bump(const struct JeftGrid *grid,
                                   const double *center,
                                   double support,
                                   double amplitude,
                                   struct JeftFunction **out);

// # Safety
// `f` must come from a `jeft_function_*` constructor and not be used afterwards.
void jeft_function_free(struct JeftFunction *f);

// # Safety
// `f` must be a live handle, `x` must hold `dim` doubles, `out` valid for writes.
enum JeftStatus jeft_function_eval(const struct JeftFunction *f, const double *x, double *out);

// Spherical function `φ_λ(r)`.
//
// # Safety
// `out` must be valid for writes.
enum JeftStatus jeft_spherical_function(enum JeftModel model,
                                        struct JeftComplex lambda,
                                        double r,
                                        struct JeftComplex *out);

// Plancherel density `|c(λ)|⁻²` with the library's normalization.
//
// # Safety
// `out` must be valid for writes.
enum JeftStatus jeft_plancherel_density(enum JeftModel model, double lambda, double *out);

// Spherical transform `f̂(λ)` of a radial function.
//
// # Safety
// Handles must be live and `out` valid for writes.
enum JeftStatus jeft_spherical_transform(const struct JeftGrid *grid,
                                         const struct JeftFunction *f,
                                         struct JeftComplex lambda,
                                         struct JeftComplex *out);

// Helgason transform `f̃(λ, b)`.
//
// # Safety
// Handles must be live, `b` must hold `dim` doubles, `out` valid for writes.
enum JeftStatus jeft_helgason(const struct JeftGrid *grid,
                              const struct JeftFunction *f,
                              struct JeftComplex lambda,
                              const double *b,
                              struct JeftComplex *out);

// Joint-eigenspace transform `f^△(λ, x)`.
//
// # Safety
// Handles must be live, `x` must hold `dim` doubles, `out` valid for writes.
enum JeftStatus jeft_transform(const struct JeftGrid *grid,
                               const struct JeftFunction *f,
                               struct JeftComplex lambda,
                               const double *x,
                               enum JeftMethod method,
                               struct JeftComplex *out);

// Poisson transform of the constant boundary function one, `φ_λ(d(o, x))`.
//
// # Safety
// `grid` must be live, `x` must hold `dim` doubles, `out` valid for writes.
enum JeftStatus jeft_poisson_constant(const struct JeftGrid *grid,
                                      struct JeftComplex lambda,
                                      const double *x,
                                      struct JeftComplex *out);

// Runs one named verification check. `reduced` selects small grids.
// Writes the measured error and whether the check succeeded.
//
// # Safety
// `check` must be a nul-terminated string; outputs valid for writes.
enum JeftStatus jeft_verify(enum JeftModel model,
                            const char *check,
                            bool reduced,
                            double *out_error,
                            bool *out_success);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JEFT_H */
