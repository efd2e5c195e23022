/* fkflow: SDE statistics flows, density evolution, and path-measure
 * verification behind a C interface.
 *
 * All functions return fk_status; FK_OK is 0. On failure, fk_last_error()
 * returns a thread-local message describing the most recent error in the
 * calling thread. Objects returned through fk_* handles are owned by the
 * caller and released with the matching _free function. The library keeps
 * no global state; handles are independent and safe to use from different
 * threads concurrently.
 */
#ifndef FKFLOW_H
#define FKFLOW_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fk_status {
  FK_OK = 0,
  FK_ERR_INVALID_ARGUMENT = 1,
  FK_ERR_NUMERIC = 2,
  FK_ERR_INFEASIBLE = 3,
  FK_ERR_INTERNAL = 4
} fk_status;

const char* fk_version(void);
/* Message for the last failing call in this thread; empty string if none. */
const char* fk_last_error(void);

/* ----- moment flows ----- */

/* Ornstein-Uhlenbeck moments at time t for dY = -b (Y - k) dt + sqrt(2 lambda) dW. */
fk_status fk_ou_moment_flow(double b, double k, double lambda, double m0, double s0,
                            double t, double* mean_out, double* variance_out);

/* Drifted Wiener moments at time t for dY = -b dt + sqrt(2 lambda) dW. */
fk_status fk_wiener_moment_flow(double b, double lambda, double m0, double s0, double t,
                                double* mean_out, double* variance_out);

/* Sup-norm residual of the closed-form OU flow group law
 * phi_s(phi_t(x0)) vs phi_{t+s}(x0). */
fk_status fk_ou_group_law_residual(double b, double k, double lambda, double m0, double s0,
                                   double t, double s, double* residual_out);

/* ----- densities ----- */

typedef struct fk_density fk_density;

/* Gaussian density N(mean, variance) sampled on its default working grid
 * (10 standard deviations either side, spacing dx if dx > 0). */
fk_status fk_density_gaussian(double mean, double variance, double dx, fk_density** out);
fk_status fk_density_size(const fk_density* density, size_t* n_out);
fk_status fk_density_point(const fk_density* density, size_t i, double* q_out, double* p_out);
fk_status fk_density_entropy(const fk_density* density, double* entropy_out);
fk_status fk_density_mean(const fk_density* density, double* mean_out);
fk_status fk_density_variance(const fk_density* density, double* variance_out);
void fk_density_free(fk_density* density);

/* ----- stochastic processes and sampling ----- */

typedef struct fk_sde fk_sde;

fk_status fk_sde_ou(double b, double k, double lambda, fk_sde** out);
fk_status fk_sde_wiener(double b, double lambda, fk_sde** out);
void fk_sde_free(fk_sde* sde);

/* Euler-Maruyama terminal states: n_paths values of Y_t_end given
 * Y_t_start = q0, written to out_values (length n_paths). Deterministic in
 * (seed, n_paths, dt). */
fk_status fk_sample_terminal(const fk_sde* sde, double q0, double t_start, double t_end,
                             double dt, size_t n_paths, unsigned long long seed,
                             double* out_values);

typedef double (*fk_scalar_fn)(double q, void* ctx);

/* Feynman-Kac estimate of E[terminal(Y_t_end) | Y_t = q] with its standard
 * error. */
fk_status fk_feynman_kac(const fk_sde* sde, fk_scalar_fn terminal, void* ctx, double q,
                         double t, double t_end, double dt, size_t n_paths,
                         unsigned long long seed, double* value_out, double* std_error_out);

/* ----- transition kernels ----- */

typedef struct fk_kernel fk_kernel;

/* Exact OU transition kernel over `step` time units on n_cells uniform cells
 * spanning [lo, hi]. */
fk_status fk_kernel_exact_ou(double b, double k, double lambda, double lo, double hi,
                             size_t n_cells, double step, fk_kernel** out);

/* Empirical kernel estimated from n_per_cell Euler-Maruyama paths started at
 * each cell midpoint. */
fk_status fk_kernel_estimate(const fk_sde* sde, double lo, double hi, size_t n_cells,
                             double t0, double t1, double dt, size_t n_per_cell,
                             unsigned long long seed, fk_kernel** out);

fk_status fk_kernel_size(const fk_kernel* kernel, size_t* n_out);
fk_status fk_kernel_entry(const fk_kernel* kernel, size_t i, size_t j, double* value_out);
/* Max row-wise total-variation residual of (k1 then k2) against k12. */
fk_status fk_kernel_sewing_residual(const fk_kernel* k1, const fk_kernel* k2,
                                    const fk_kernel* k12, double* residual_out);
void fk_kernel_free(fk_kernel* kernel);

/* ----- experiments ----- */

typedef struct fk_result fk_result;

typedef struct fk_run_options {
  int has_seed;                 /* nonzero to override the config seed */
  unsigned long long seed;
} fk_run_options;

/* Runs the experiment described by a JSON config document (see the bundled
 * configs for the schema). options may be NULL. */
fk_status fk_experiment_run(const char* config_json, const fk_run_options* options,
                            fk_result** out);

/* The JSON report; owned by the result. */
fk_status fk_result_report(const fk_result* result, const char** report_json_out);
/* Human-readable per-check lines. */
fk_status fk_result_summary(const fk_result* result, const char** text_out);
fk_status fk_result_passed(const fk_result* result, int* passed_out);
/* Output directory echoed from the config ("" when unset). */
fk_status fk_result_output_dir(const fk_result* result, const char** dir_out);
fk_status fk_result_artifact_count(const fk_result* result, size_t* count_out);
fk_status fk_result_artifact(const fk_result* result, size_t index, const char** name_out,
                             const char** content_out);
void fk_result_free(fk_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FKFLOW_H */
