/* C interface to the hybridqc library.
 *
 * Every call returns an hqc_status; on failure hqc_last_error() gives a
 * message for the calling thread. Objects are opaque handles released with
 * their matching destroy function. Matrices are dense, row-major.
 */
#ifndef HYBRIDQC_H
#define HYBRIDQC_H

#include <stddef.h>
#include <stdint.h>

#if defined(HQC_BUILDING_LIBRARY)
#define HQC_API __attribute__((visibility("default")))
#else
#define HQC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hqc_status {
  HQC_OK = 0,
  HQC_ERR_INVALID_ARGUMENT = 1,
  HQC_ERR_DIMENSION = 2,
  HQC_ERR_NUMERICAL = 3,
  HQC_ERR_CONFIG = 4,
  HQC_ERR_VERIFICATION = 5,
  HQC_ERR_IO = 6,
  HQC_ERR_INTERNAL = 7
} hqc_status;

HQC_API const char* hqc_version(void);
HQC_API const char* hqc_status_name(hqc_status status);
/* Message of the last failed call on this thread, "" if none. */
HQC_API const char* hqc_last_error(void);
/* Process exit code for a status: 0 ok, 2 config/io/argument, 3 numerical,
 * 4 verification, 1 otherwise. */
HQC_API int hqc_exit_code(hqc_status status);

/* Scenario configuration and runs. */
typedef struct hqc_config hqc_config;

HQC_API hqc_status hqc_config_create(hqc_config** out);
HQC_API void hqc_config_destroy(hqc_config* cfg);
/* Merges key=value lines from a file; later settings override earlier ones. */
HQC_API hqc_status hqc_config_load_file(hqc_config* cfg, const char* path);
/* Sets one key, including the reserved scenario, out, seed and figure. */
HQC_API hqc_status hqc_config_set(hqc_config* cfg, const char* key, const char* value);
/* Runs the configured scenario and writes its files. */
HQC_API hqc_status hqc_config_run(const hqc_config* cfg);

/* Column-oriented result series. */
typedef struct hqc_series hqc_series;

HQC_API size_t hqc_series_rows(const hqc_series* s);
HQC_API size_t hqc_series_columns(const hqc_series* s);
HQC_API const char* hqc_series_column_name(const hqc_series* s, size_t column);
/* Pointer to hqc_series_rows() values, valid until the series is destroyed;
 * NULL for an out-of-range column. */
HQC_API const double* hqc_series_column(const hqc_series* s, size_t column);
HQC_API void hqc_series_destroy(hqc_series* s);

/* Dispersion series t, dq, dp, dx, dk, dqdp, dxdk, total for two coupled
 * oscillators, the first starting as a classical point at the origin and the
 * second in its coherent ground state. */
HQC_API hqc_status hqc_wigner_dispersion(double Omega, double omega, double gamma, double hbar, double t_max,
                                         double dt, hqc_series** out);

/* Trace distance between the z-basis and y-basis ensembles, columns t,
 * trace_distance, q_mean_1, q_mean_2, q_var_1, q_var_2. coupling is
 * "sigma_x", "sigma_y" or "sigma_z". */
HQC_API hqc_status hqc_ensemble_divergence(double gamma, const char* coupling, double q0, double t_max, double t_step,
                                           double dt, hqc_series** out);

typedef struct hqc_benchmark {
  int achievable;
  double residual;
  double min_eigenvalue;
} hqc_benchmark;

HQC_API hqc_status hqc_sudarshan_first_moment(double Omega, double omega, double gamma, double alpha, double beta,
                                              hqc_benchmark* out);
HQC_API hqc_status hqc_sudarshan_second_moment(double Omega, double omega, double gamma, double hbar,
                                               hqc_benchmark* out);

/* Positive-semidefiniteness of cov + (i hbar / 2) S for n x n matrices. */
HQC_API hqc_status hqc_robertson_check(size_t n, const double* cov, const double* structure, double hbar,
                                       int* feasible, double* min_eigenvalue);

/* out = exp(t * generator), n x n. */
HQC_API hqc_status hqc_propagator(size_t n, const double* generator, double t, double* out);

#ifdef __cplusplus
}
#endif

#endif
