#ifndef MIURA_H
#define MIURA_H

/* Generated by cbindgen from miura-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit taxonomy.
 */
typedef enum MiuraStatus {
  MIURA_STATUS_OK = 0,
  /**
   * Null pointer, undersized buffer, or invalid numeric argument.
   */
  MIURA_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Spec string or symbol file failed to parse.
   */
  MIURA_STATUS_PARSE_ERROR = 2,
  /**
   * Initial data is not Miura-compatible with the background flow.
   */
  MIURA_STATUS_GATE_ERROR = 3,
  /**
   * Numerical failure (domain escape, step-size limit, non-finite data).
   */
  MIURA_STATUS_NUMERICAL_ERROR = 4,
} MiuraStatus;

/**
 * Opaque pipeline result handle.
 */
typedef struct MiuraPipeline MiuraPipeline;

/**
 * Scalar diagnostics of a pipeline run.
 */
typedef struct MiuraDiagnostics {
  double min_psi;
  double kernel_residual;
  double mkdv_residual;
  double wronskian_drift;
  double r0_fidelity;
  double gate_deviation;
} MiuraDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread (empty if none).
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *miura_last_error_message(void);

/**
 * Invert the Miura map along a KdV flow.
 *
 * `r0_spec` is an initial-data preset (`kink`, `zero`, `const:c=..`,
 * `csv:file=..`) and `q_spec` a KdV solution spec (`zero`, `const:c=..`,
 * `soliton:kappa=..,x0=..`, `boost:c=..(..)`, `numeric:file=..`) or
 * `auto`. On success `*out` owns the handle; free it with
 * [`miura_pipeline_free`].
 *
 * # Safety
 * `r0_spec` and `q_spec` must be valid NUL-terminated strings and `out` a
 * valid pointer; the handle must be freed exactly once.
 */
enum MiuraStatus miura_pipeline_run(const char *r0_spec,
                                    const char *q_spec,
                                    double x_min,
                                    double x_max,
                                    uintptr_t nx,
                                    double t_max,
                                    uintptr_t nt,
                                    double gate_tol,
                                    struct MiuraPipeline **out);

/**
 * Number of spatial nodes of the result grid.
 *
 * # Safety
 * `handle` must be a live pipeline handle.
 */
uintptr_t miura_pipeline_nx(const struct MiuraPipeline *handle);

/**
 * Number of time levels of the result grid.
 *
 * # Safety
 * `handle` must be a live pipeline handle.
 */
uintptr_t miura_pipeline_nt(const struct MiuraPipeline *handle);

/**
 * Copy the recovered mKdV solution r(t, x), row-major over (t, x).
 *
 * # Safety
 * `handle` must be live; `buf` must point to at least `len` doubles.
 */
enum MiuraStatus miura_pipeline_r(const struct MiuraPipeline *handle, double *buf, uintptr_t len);

/**
 * Copy log psi(t, x), row-major over (t, x).
 *
 * # Safety
 * `handle` must be live; `buf` must point to at least `len` doubles.
 */
enum MiuraStatus miura_pipeline_log_psi(const struct MiuraPipeline *handle,
                                        double *buf,
                                        uintptr_t len);

/**
 * Fill the scalar diagnostics of a run.
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer.
 */
enum MiuraStatus miura_pipeline_diagnostics(const struct MiuraPipeline *handle,
                                            struct MiuraDiagnostics *out);

/**
 * Free a pipeline handle (null is a no-op).
 *
 * # Safety
 * `handle` must come from [`miura_pipeline_run`] and not be freed twice.
 */
void miura_pipeline_free(struct MiuraPipeline *handle);

/**
 * Eigenvalues of -d2/dx2 + q on [x_min, x_min + (n-1) h] with Dirichlet
 * ends, inside (window_lo, window_hi), by Sturm bisection. Writes at most
 * `cap` eigenvalues into `buf` and the discovered count into `n_out`.
 *
 * # Safety
 * `q` must point to `n` doubles, `buf` to `cap` doubles, `n_out` must be
 * a valid pointer.
 */
enum MiuraStatus miura_schrodinger_spectrum(const double *q,
                                            uintptr_t n,
                                            double x_min,
                                            double h,
                                            double window_lo,
                                            double window_hi,
                                            double tol,
                                            double *buf,
                                            uintptr_t cap,
                                            uintptr_t *n_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIURA_H */
