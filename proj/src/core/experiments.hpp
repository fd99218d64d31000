#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/optimizer.hpp"

namespace dro {

// Shared solver/runtime knobs for the replication harness.
struct HarnessOptions {
  std::int64_t threads = 0;  // 0: DRO_VAR_THREADS env, then hardware
  double solver_tol = 1e-10;
  std::int64_t max_iter = 1000;
};

struct SimulateConfig {
  std::int64_t d = 10;
  double r = 10.0;  // radius of the l2 constraint; v = r/(2 sqrt(d)) * 1
  std::vector<std::int64_t> n_list;
  std::vector<double> B_list;
  std::int64_t reps = 100;
  bool rho_fixed = false;
  double rho_value = 0.0;  // used when rho_fixed
  double delta = 0.05;     // coverage rule otherwise
  std::uint64_t seed = 1;
  HarnessOptions opts;
};

struct MedianConfig {
  std::vector<std::int64_t> n_list;
  std::int64_t reps = 100;
  std::uint64_t seed = 1;
  HarnessOptions opts;
};

struct CoverageConfig {
  std::int64_t d = 10;
  double r = 10.0;
  double B = 1.0;
  std::int64_t n = 1000;
  std::int64_t reps = 100;
  double delta = 0.05;
  std::uint64_t seed = 1;
  HarnessOptions opts;
};

// One CSV row. Replication rows carry per-fit numbers; each cell gets one
// trailing aggregate row (replication = -1) whose fields are pure functions
// of the cell's replication rows.
struct ReportRow {
  std::string experiment;
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::string param_name;
  double param_value = 0.0;
  double rho = 0.0;
  std::string constraint;
  std::int64_t replication = -1;

  double risk_erm = nan_value();
  double risk_rob = nan_value();
  double cert_upper = nan_value();
  double coverage_flag = nan_value();  // 1/0 per replication
  std::string status_erm;
  std::string status_rob;

  double var_erm = nan_value();
  double var_rob = nan_value();
  double t_statistic = nan_value();
  double p_value = nan_value();
  double coverage_fraction = nan_value();
  double coverage_lo = nan_value();
  double coverage_hi = nan_value();
  double prob_erm_ge_delta = nan_value();
  double prob_rob_le_bound = nan_value();

  static double nan_value();
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::uint64_t seed = 0;
  double wall_time_sec = 0.0;  // informational; never serialized
};

ExperimentReport run_simulate(const SimulateConfig& config);
ExperimentReport run_median(const MedianConfig& config);
ExperimentReport run_coverage(const CoverageConfig& config);

std::string report_to_csv(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);
void write_file(const std::string& path, const std::string& contents);

// Exact population risks for the synthetic experiments.
double median_population_risk(double theta, double delta);
double simulate_population_risk(const std::vector<double>& theta,
                                const std::vector<double>& v);

// Lipschitz constant 3r + sqrt(d) B of the perturbed quadratic over the ball.
double simulate_lipschitz(double r, std::int64_t d, double B);
// A-priori loss range bound over the ball times the cube.
double simulate_loss_range(double r, std::int64_t d, double B);

std::int64_t resolve_threads(std::int64_t requested);

// Runs fn(i) for i in [0, count) on up to `threads` workers; exceptions
// propagate after all workers join.
void parallel_for(std::int64_t count, std::int64_t threads,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace dro
