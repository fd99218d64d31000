/* dro-var: variance-based regularization via distributionally robust
 * optimization over chi-square divergence balls.
 *
 * C API of the shared library. All functions return a status code from
 * drovar_status (0 on success); drovar_last_error() describes the most
 * recent failure on the calling thread. Handles are opaque and owned by
 * the caller until passed to the matching _free function.
 */
#ifndef DROVAR_H
#define DROVAR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DROVAR_API __declspec(dllexport)
#else
#define DROVAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum drovar_status {
  DROVAR_OK = 0,
  DROVAR_ERR_INPUT = 1,  /* invalid argument (non-finite data, bad sizes) */
  DROVAR_ERR_IO = 2,
  DROVAR_ERR_PARSE = 3,
  DROVAR_ERR_CONFIG = 4,
  DROVAR_ERR_SOLVER = 5
} drovar_status;

typedef struct drovar_dataset drovar_dataset;
typedef struct drovar_solution drovar_solution;
typedef struct drovar_fit drovar_fit;

DROVAR_API const char* drovar_version(void);

/* Message for the last failing call on this thread; empty string if none. */
DROVAR_API const char* drovar_last_error(void);

/* ------------------------------------------------------------------ */
/* Datasets                                                             */

/* format: "svmlight" (sparse `<label> <i>:<v> ...`, 1-based indices) or
 * "csv" (dense, header row). add_bias appends a constant-1 feature. */
DROVAR_API int drovar_dataset_load(const char* path, const char* format,
                                   int add_bias, drovar_dataset** out);
DROVAR_API int drovar_dataset_parse(const char* text, const char* format,
                                    int add_bias, drovar_dataset** out);
DROVAR_API int drovar_dataset_gen_median(int64_t n, double delta, uint64_t seed,
                                         drovar_dataset** out);
DROVAR_API int drovar_dataset_gen_cube(int64_t n, int64_t d, double B,
                                       uint64_t seed, drovar_dataset** out);
DROVAR_API void drovar_dataset_free(drovar_dataset* data);
DROVAR_API int64_t drovar_dataset_size(const drovar_dataset* data);
DROVAR_API int64_t drovar_dataset_dim(const drovar_dataset* data);

/* ------------------------------------------------------------------ */
/* Worst-case distribution over the chi-square ball                     */

/* Solves max { <p, z> : p in simplex, 0.5 ||n p - 1||^2 <= rho }. */
DROVAR_API int drovar_worst_case(const double* z, int64_t n, double rho,
                                 double tol, drovar_solution** out);
DROVAR_API void drovar_solution_free(drovar_solution* sol);
DROVAR_API double drovar_solution_value(const drovar_solution* sol);
DROVAR_API double drovar_solution_lambda(const drovar_solution* sol);
DROVAR_API double drovar_solution_eta(const drovar_solution* sol);
DROVAR_API double drovar_solution_expansion_gap(const drovar_solution* sol);
DROVAR_API int drovar_solution_constraint_active(const drovar_solution* sol);
DROVAR_API const char* drovar_solution_fast_path(const drovar_solution* sol);
/* Copies min(n, cap) weights into out; returns n. */
DROVAR_API int64_t drovar_solution_weights(const drovar_solution* sol,
                                           double* out, int64_t cap);
/* Writes the probe JSON for this solution (weights elided when
 * include_weights is 0). */
DROVAR_API int drovar_solution_write_json(const drovar_solution* sol, double rho,
                                          int include_weights, const char* path);

/* Closed form mean + sqrt(2 rho s^2 / n); NaN on invalid input. */
DROVAR_API double drovar_variance_expansion(const double* z, int64_t n,
                                            double rho);
/* 1 when the exact-expansion condition holds, 0 when not, negative status
 * on invalid input. */
DROVAR_API int drovar_expansion_condition(const double* z, int64_t n,
                                          double rho);
/* rho = log(2/delta) + d log(2 n D L); NaN on invalid input. */
DROVAR_API double drovar_rho_for_coverage(double delta, int64_t d, int64_t n,
                                          double D, double L);

/* ------------------------------------------------------------------ */
/* Robust fits                                                          */

typedef struct drovar_fit_config {
  int64_t max_iter;      /* default 1000 */
  double grad_map_tol;   /* default 1e-8 */
  double armijo_c;       /* default 1e-4 */
  double backtrack;      /* default 0.5 */
  double init_step;      /* default 1.0 */
  int64_t max_backtracks;/* default 50 */
  double solver_tol;     /* inner solver tolerance, default 1e-10 */
  double cert_range;     /* a-priori loss range M; <= 0: observed range */
} drovar_fit_config;

DROVAR_API void drovar_fit_config_init(drovar_fit_config* config);

/* loss: "logistic" | "squared" | "absolute_median".
 * constraint: "none" | "l2:R" | "l1:R" | "en:A1,A2,R" | "box:LO,HI". */
DROVAR_API int drovar_fit_run(const drovar_dataset* data, const char* loss,
                              double rho, const char* constraint,
                              const drovar_fit_config* config, drovar_fit** out);
DROVAR_API void drovar_fit_free(drovar_fit* fit);
DROVAR_API int64_t drovar_fit_dim(const drovar_fit* fit);
DROVAR_API int64_t drovar_fit_theta(const drovar_fit* fit, double* out,
                                    int64_t cap);
DROVAR_API double drovar_fit_objective(const drovar_fit* fit);
DROVAR_API int64_t drovar_fit_iterations(const drovar_fit* fit);
DROVAR_API int drovar_fit_converged(const drovar_fit* fit);
DROVAR_API const char* drovar_fit_status(const drovar_fit* fit);
DROVAR_API double drovar_fit_certificate_upper(const drovar_fit* fit); /* NaN if none */
DROVAR_API int drovar_fit_write_json(const drovar_fit* fit, const char* path);

/* ------------------------------------------------------------------ */
/* Experiment harness (writes deterministic CSV, optional JSON)         */

typedef struct drovar_simulate_config {
  int64_t d;
  double r;                 /* l2 constraint radius (default 10) */
  const int64_t* n_list;
  int64_t n_count;
  const double* B_list;
  int64_t B_count;
  int64_t reps;
  int rho_fixed;            /* nonzero: use rho_value; else coverage rule */
  double rho_value;
  double delta;             /* coverage rule confidence (default 0.05) */
  uint64_t seed;
  int64_t threads;          /* 0: DRO_VAR_THREADS env or hardware */
  double solver_tol;
  int64_t max_iter;
} drovar_simulate_config;

typedef struct drovar_median_config {
  const int64_t* n_list;
  int64_t n_count;
  int64_t reps;
  uint64_t seed;
  int64_t threads;
  double solver_tol;
  int64_t max_iter;
} drovar_median_config;

typedef struct drovar_coverage_config {
  int64_t d;
  double r;
  double B;
  int64_t n;
  int64_t reps;
  double delta;
  uint64_t seed;
  int64_t threads;
  double solver_tol;
  int64_t max_iter;
} drovar_coverage_config;

DROVAR_API int drovar_run_simulate(const drovar_simulate_config* config,
                                   const char* csv_path, const char* json_path);
DROVAR_API int drovar_run_median(const drovar_median_config* config,
                                 const char* csv_path, const char* json_path);
DROVAR_API int drovar_run_coverage(const drovar_coverage_config* config,
                                   const char* csv_path, const char* json_path);

#ifdef __cplusplus
}
#endif

#endif /* DROVAR_H */
