/*
 * h2wkit C interface.
 *
 * Opaque handles wrap the C++ core; every fallible call returns an
 * h2w_status and leaves a thread-local message behind h2w_last_error().
 * Matrices cross the boundary as dense row-major double arrays.
 */
#ifndef H2WKIT_H
#define H2WKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define H2W_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define H2W_API __attribute__((visibility("default")))
#else
#  define H2W_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct h2w_model h2w_model;
typedef struct h2w_spectrum h2w_spectrum;

/* Values 2..6 coincide with the CLI exit codes. */
typedef enum h2w_status {
  H2W_OK = 0,
  H2W_ERR_PARSE = 2,            /* malformed document, I/O, dimension mismatch */
  H2W_ERR_BAND = 3,             /* omega reaches a purely imaginary pole */
  H2W_ERR_DEGENERATE = 4,       /* repeated / near-defective poles */
  H2W_ERR_DISAGREEMENT = 5,     /* h2w_compare: deviation above threshold */
  H2W_ERR_SOLVER = 6,           /* Lyapunov/eigen/quadrature failure */
  H2W_ERR_INVALID_ARGUMENT = 7,
  H2W_ERR_PRECONDITION = 8,     /* backend needs a stable or strictly proper model */
  H2W_ERR_DOMAIN = 9,
  H2W_ERR_INTERNAL = 10
} h2w_status;

typedef enum h2w_backend {
  H2W_BACKEND_SPECTRAL = 0,
  H2W_BACKEND_GRAMIAN = 1,
  H2W_BACKEND_QUADRATURE = 2
} h2w_backend;

typedef enum h2w_limit_regime {
  H2W_LIMIT_STABLE = 0,    /* tends to the H2 norm */
  H2W_LIMIT_UNSTABLE = 1,  /* finite, no H2 interpretation */
  H2W_LIMIT_IMAGINARY = 2  /* diverges */
} h2w_limit_regime;

typedef struct h2w_norm_result {
  double value_sq;
  double value;
  double imag_residual;
  double elapsed_seconds;
  h2w_backend backend;
  int h2_interpretation; /* 0 when the model has antistable poles */
} h2w_norm_result;

typedef struct h2w_compare_report {
  h2w_norm_result results[3]; /* indexed by h2w_backend */
  int available[3];           /* 0 when a backend does not apply */
  double max_rel_deviation;
} h2w_compare_report;

H2W_API const char* h2w_version(void);
H2W_API const char* h2w_last_error(void);
H2W_API const char* h2w_status_string(h2w_status status);
H2W_API const char* h2w_backend_name(h2w_backend backend);
/* Accepts "spectral", "gramian", "quadrature". */
H2W_API h2w_status h2w_backend_parse(const char* name, h2w_backend* out);

/* ---- models ---------------------------------------------------------- */

/* a: n*n, b: n*nu, c: ny*n, d: ny*nu (NULL for zero). Row-major. */
H2W_API h2w_status h2w_model_create(size_t n, size_t nu, size_t ny, const double* a,
                                    const double* b, const double* c, const double* d,
                                    h2w_model** out);
H2W_API h2w_status h2w_model_load_file(const char* path, h2w_model** out);
H2W_API h2w_status h2w_model_load_string(const char* text, size_t len, h2w_model** out);
H2W_API h2w_status h2w_model_save_file(const h2w_model* model, const char* path);
/* Writes at most cap bytes including the terminating NUL; *needed receives
 * the full size. Passing buf = NULL, cap = 0 queries the size. A buffer that
 * is too small still receives the NUL-terminated prefix, and the call returns
 * H2W_ERR_INVALID_ARGUMENT. */
H2W_API h2w_status h2w_model_save_string(const h2w_model* model, char* buf, size_t cap,
                                         size_t* needed);
/* spectrum: "stable", "antistable", "mixed:<p>", "lightly_damped:<zeta>". */
H2W_API h2w_status h2w_model_random(size_t n, size_t nu, size_t ny, const char* spectrum,
                                    uint64_t seed, int feedthrough, h2w_model** out);
H2W_API h2w_status h2w_model_dims(const h2w_model* model, size_t* n, size_t* nu,
                                  size_t* ny);
H2W_API const char* h2w_model_name(const h2w_model* model);
H2W_API h2w_status h2w_model_set_name(h2w_model* model, const char* name);
H2W_API void h2w_model_free(h2w_model* model);

/* ---- norms ----------------------------------------------------------- */

/* Squared norm over [omega_lo, omega_hi]. omega_hi = INFINITY (with
 * omega_lo = 0) selects the infinite-horizon H2 norm for the spectral and
 * Gramian backends. omega_lo = omega_hi = 0 yields 0. tol is the quadrature
 * tolerance; tol <= 0 selects 1e-9. Every call recomputes all intermediate
 * decompositions. */
H2W_API h2w_status h2w_norm(const h2w_model* model, h2w_backend backend, double omega_lo,
                            double omega_hi, double tol, h2w_norm_result* out);

/* Runs all applicable backends over [0, omega]. The Gramian backend is
 * skipped (available[1] = 0) for unstable or non-strictly-proper models.
 * Returns H2W_ERR_DISAGREEMENT, with the report filled in, when the largest
 * pairwise relative deviation exceeds threshold. */
H2W_API h2w_status h2w_compare(const h2w_model* model, double omega, double tol,
                               double threshold, h2w_compare_report* out);

/* ---- cached spectral decomposition ------------------------------------ */

H2W_API h2w_status h2w_spectrum_create(const h2w_model* model, h2w_spectrum** out);
H2W_API size_t h2w_spectrum_size(const h2w_spectrum* spectrum);
H2W_API h2w_status h2w_spectrum_pole(const h2w_spectrum* spectrum, size_t i, double* re,
                                     double* im);
H2W_API double h2w_spectrum_radius(const h2w_spectrum* spectrum);
/* Same conventions as h2w_norm, spectral backend, decomposition reused. */
H2W_API h2w_status h2w_spectrum_norm(const h2w_spectrum* spectrum, double omega_lo,
                                     double omega_hi, h2w_norm_result* out);
/* omega -> infinity behaviour; *value_sq is +INFINITY for the imaginary
 * regime. Requires a strictly proper model. */
H2W_API h2w_status h2w_spectrum_limit(const h2w_spectrum* spectrum,
                                      h2w_limit_regime* regime, double* value_sq);
H2W_API void h2w_spectrum_free(h2w_spectrum* spectrum);

#ifdef __cplusplus
}
#endif

#endif /* H2WKIT_H */
