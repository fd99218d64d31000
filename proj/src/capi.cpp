#include "drovar.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "core/chi2.hpp"
#include "core/data.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/fitio.hpp"
#include "core/risk.hpp"

namespace {

thread_local std::string g_last_error;

int set_error(const dro::Error& e) {
  g_last_error = e.what();
  return static_cast<int>(e.code());
}

int set_error(const std::exception& e) {
  g_last_error = e.what();
  return DROVAR_ERR_INPUT;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DROVAR_OK;
  } catch (const dro::Error& e) {
    return set_error(e);
  } catch (const std::exception& e) {
    return set_error(e);
  }
}

}  // namespace

struct drovar_dataset {
  dro::Dataset data;
};

struct drovar_solution {
  dro::WorstCaseSolution solution;
  double rho = 0.0;
};

struct drovar_fit {
  dro::FitOutput output;
};

extern "C" {

const char* drovar_version(void) { return "0.1.0"; }

const char* drovar_last_error(void) { return g_last_error.c_str(); }

int drovar_dataset_load(const char* path, const char* format, int add_bias,
                        drovar_dataset** out) {
  return guarded([&] {
    if (path == nullptr || format == nullptr || out == nullptr) {
      throw dro::InputError("null argument");
    }
    auto handle = new drovar_dataset{dro::load_dataset(path, format, add_bias != 0)};
    *out = handle;
  });
}

int drovar_dataset_parse(const char* text, const char* format, int add_bias,
                         drovar_dataset** out) {
  return guarded([&] {
    if (text == nullptr || format == nullptr || out == nullptr) {
      throw dro::InputError("null argument");
    }
    dro::Dataset data;
    std::string fmt(format);
    if (fmt == "svmlight" || fmt == "sparse") {
      data = dro::parse_sparse(text);
    } else if (fmt == "csv") {
      data = dro::parse_csv(text);
    } else {
      throw dro::ConfigError("unknown dataset format: " + fmt);
    }
    if (add_bias != 0) data = dro::with_bias(data);
    *out = new drovar_dataset{std::move(data)};
  });
}

int drovar_dataset_gen_median(int64_t n, double delta, uint64_t seed,
                              drovar_dataset** out) {
  return guarded([&] {
    if (out == nullptr) throw dro::InputError("null argument");
    *out = new drovar_dataset{dro::gen_median_data(n, delta, seed)};
  });
}

int drovar_dataset_gen_cube(int64_t n, int64_t d, double B, uint64_t seed,
                            drovar_dataset** out) {
  return guarded([&] {
    if (out == nullptr) throw dro::InputError("null argument");
    *out = new drovar_dataset{dro::gen_uniform_cube(n, d, B, seed)};
  });
}

void drovar_dataset_free(drovar_dataset* data) { delete data; }

int64_t drovar_dataset_size(const drovar_dataset* data) {
  return data == nullptr ? -1 : data->data.n();
}

int64_t drovar_dataset_dim(const drovar_dataset* data) {
  return data == nullptr ? -1 : data->data.d;
}

int drovar_worst_case(const double* z, int64_t n, double rho, double tol,
                      drovar_solution** out) {
  return guarded([&] {
    if (z == nullptr || out == nullptr || n < 1) {
      throw dro::InputError("need a nonempty loss vector");
    }
    dro::LossVector losses(std::vector<double>(z, z + n));
    auto handle = new drovar_solution;
    handle->solution = dro::worst_case_distribution(losses, rho, tol);
    handle->rho = rho;
    *out = handle;
  });
}

void drovar_solution_free(drovar_solution* sol) { delete sol; }

double drovar_solution_value(const drovar_solution* sol) {
  return sol == nullptr ? NAN : sol->solution.value;
}

double drovar_solution_lambda(const drovar_solution* sol) {
  return sol == nullptr ? NAN : sol->solution.lambda;
}

double drovar_solution_eta(const drovar_solution* sol) {
  return sol == nullptr ? NAN : sol->solution.eta;
}

double drovar_solution_expansion_gap(const drovar_solution* sol) {
  return sol == nullptr ? NAN : sol->solution.expansion_gap;
}

int drovar_solution_constraint_active(const drovar_solution* sol) {
  return sol != nullptr && sol->solution.constraint_active ? 1 : 0;
}

const char* drovar_solution_fast_path(const drovar_solution* sol) {
  return sol == nullptr ? "" : dro::to_string(sol->solution.fast_path);
}

int64_t drovar_solution_weights(const drovar_solution* sol, double* out,
                                int64_t cap) {
  if (sol == nullptr) return -1;
  auto n = static_cast<int64_t>(sol->solution.weights.size());
  if (out != nullptr && cap > 0) {
    std::memcpy(out, sol->solution.weights.data(),
                sizeof(double) * static_cast<std::size_t>(std::min(cap, n)));
  }
  return n;
}

int drovar_solution_write_json(const drovar_solution* sol, double rho,
                               int include_weights, const char* path) {
  return guarded([&] {
    if (sol == nullptr || path == nullptr) throw dro::InputError("null argument");
    dro::write_file(path, dro::solution_to_json(sol->solution, rho,
                                                include_weights != 0));
  });
}

double drovar_variance_expansion(const double* z, int64_t n, double rho) {
  try {
    dro::LossVector losses(std::vector<double>(z, z + n));
    return dro::variance_expansion_value(losses, rho);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NAN;
  }
}

int drovar_expansion_condition(const double* z, int64_t n, double rho) {
  try {
    dro::LossVector losses(std::vector<double>(z, z + n));
    return dro::expansion_condition_holds(losses, rho) ? 1 : 0;
  } catch (const dro::Error& e) {
    return -set_error(e);
  } catch (const std::exception& e) {
    return -set_error(e);
  }
}

double drovar_rho_for_coverage(double delta, int64_t d, int64_t n, double D,
                               double L) {
  try {
    return dro::rho_for_coverage(delta, d, n, D, L);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NAN;
  }
}

void drovar_fit_config_init(drovar_fit_config* config) {
  if (config == nullptr) return;
  dro::SolverConfig defaults;
  config->max_iter = defaults.max_iter;
  config->grad_map_tol = defaults.grad_map_tol;
  config->armijo_c = defaults.armijo_c;
  config->backtrack = defaults.backtrack;
  config->init_step = defaults.init_step;
  config->max_backtracks = defaults.max_backtracks;
  config->solver_tol = 1e-10;
  config->cert_range = 0.0;
}

int drovar_fit_run(const drovar_dataset* data, const char* loss, double rho,
                   const char* constraint, const drovar_fit_config* config,
                   drovar_fit** out) {
  return guarded([&] {
    if (data == nullptr || loss == nullptr || constraint == nullptr ||
        out == nullptr) {
      throw dro::InputError("null argument");
    }
    dro::FitRequest request;
    request.loss = loss;
    request.rho = rho;
    request.constraint = constraint;
    if (config != nullptr) {
      request.solver.max_iter = config->max_iter;
      request.solver.grad_map_tol = config->grad_map_tol;
      request.solver.armijo_c = config->armijo_c;
      request.solver.backtrack = config->backtrack;
      request.solver.init_step = config->init_step;
      request.solver.max_backtracks = config->max_backtracks;
      request.solver_tol = config->solver_tol;
      request.cert_range = config->cert_range;
    }
    *out = new drovar_fit{dro::run_fit(data->data, request)};
  });
}

void drovar_fit_free(drovar_fit* fit) { delete fit; }

int64_t drovar_fit_dim(const drovar_fit* fit) {
  return fit == nullptr ? -1
                        : static_cast<int64_t>(fit->output.fit.theta_hat.size());
}

int64_t drovar_fit_theta(const drovar_fit* fit, double* out, int64_t cap) {
  if (fit == nullptr) return -1;
  auto d = static_cast<int64_t>(fit->output.fit.theta_hat.size());
  if (out != nullptr && cap > 0) {
    std::memcpy(out, fit->output.fit.theta_hat.data(),
                sizeof(double) * static_cast<std::size_t>(std::min(cap, d)));
  }
  return d;
}

double drovar_fit_objective(const drovar_fit* fit) {
  return fit == nullptr ? NAN : fit->output.fit.objective_trace.back();
}

int64_t drovar_fit_iterations(const drovar_fit* fit) {
  return fit == nullptr ? -1 : fit->output.fit.iterations;
}

int drovar_fit_converged(const drovar_fit* fit) {
  return fit != nullptr && fit->output.fit.converged ? 1 : 0;
}

const char* drovar_fit_status(const drovar_fit* fit) {
  return fit == nullptr ? "" : dro::to_string(fit->output.fit.status);
}

double drovar_fit_certificate_upper(const drovar_fit* fit) {
  if (fit == nullptr || !fit->output.cert) return NAN;
  return fit->output.cert->upper_bound;
}

int drovar_fit_write_json(const drovar_fit* fit, const char* path) {
  return guarded([&] {
    if (fit == nullptr || path == nullptr) throw dro::InputError("null argument");
    dro::write_file(path, dro::fit_to_json(fit->output));
  });
}

namespace {

void write_report(const dro::ExperimentReport& report, const char* csv_path,
                  const char* json_path) {
  if (csv_path != nullptr) dro::write_file(csv_path, dro::report_to_csv(report));
  if (json_path != nullptr) dro::write_file(json_path, dro::report_to_json(report));
}

}  // namespace

int drovar_run_simulate(const drovar_simulate_config* config,
                        const char* csv_path, const char* json_path) {
  return guarded([&] {
    if (config == nullptr) throw dro::InputError("null config");
    dro::SimulateConfig sim;
    sim.d = config->d;
    sim.r = config->r > 0.0 ? config->r : 10.0;
    sim.n_list.assign(config->n_list, config->n_list + config->n_count);
    sim.B_list.assign(config->B_list, config->B_list + config->B_count);
    sim.reps = config->reps;
    sim.rho_fixed = config->rho_fixed != 0;
    sim.rho_value = config->rho_value;
    sim.delta = config->delta > 0.0 ? config->delta : 0.05;
    sim.seed = config->seed;
    sim.opts.threads = config->threads;
    if (config->solver_tol > 0.0) sim.opts.solver_tol = config->solver_tol;
    if (config->max_iter > 0) sim.opts.max_iter = config->max_iter;
    write_report(dro::run_simulate(sim), csv_path, json_path);
  });
}

int drovar_run_median(const drovar_median_config* config, const char* csv_path,
                      const char* json_path) {
  return guarded([&] {
    if (config == nullptr) throw dro::InputError("null config");
    dro::MedianConfig med;
    med.n_list.assign(config->n_list, config->n_list + config->n_count);
    med.reps = config->reps;
    med.seed = config->seed;
    med.opts.threads = config->threads;
    if (config->solver_tol > 0.0) med.opts.solver_tol = config->solver_tol;
    if (config->max_iter > 0) med.opts.max_iter = config->max_iter;
    write_report(dro::run_median(med), csv_path, json_path);
  });
}

int drovar_run_coverage(const drovar_coverage_config* config,
                        const char* csv_path, const char* json_path) {
  return guarded([&] {
    if (config == nullptr) throw dro::InputError("null config");
    dro::CoverageConfig cov;
    cov.d = config->d;
    cov.r = config->r > 0.0 ? config->r : 10.0;
    cov.B = config->B;
    cov.n = config->n;
    cov.reps = config->reps;
    cov.delta = config->delta > 0.0 ? config->delta : 0.05;
    cov.seed = config->seed;
    cov.opts.threads = config->threads;
    if (config->solver_tol > 0.0) cov.opts.solver_tol = config->solver_tol;
    if (config->max_iter > 0) cov.opts.max_iter = config->max_iter;
    write_report(dro::run_coverage(cov), csv_path, json_path);
  });
}

}  // extern "C"
