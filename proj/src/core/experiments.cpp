#include "core/experiments.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

namespace dro {

double ReportRow::nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

std::int64_t resolve_threads(std::int64_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DRO_VAR_THREADS")) {
    std::int64_t parsed = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::string_view(env).size(), parsed);
    if (ec == std::errc() && parsed > 0) return parsed;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<std::int64_t>(hw);
}

void parallel_for(std::int64_t count, std::int64_t threads,
                  const std::function<void(std::int64_t)>& fn) {
  threads = std::min<std::int64_t>(std::max<std::int64_t>(threads, 1), count);
  if (threads <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next(0);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (std::int64_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double median_population_risk(double theta, double delta) {
  // On [-1, 1] the three-point formula collapses to delta * |theta|; using
  // the collapsed form keeps boundary events like R(1) = delta exact.
  double a = std::abs(theta);
  if (a <= 1.0) return delta * a;
  return delta * a +
         0.5 * (1.0 - delta) * (std::abs(theta - 1.0) + std::abs(theta + 1.0)) -
         (1.0 - delta);
}

double simulate_population_risk(const std::vector<double>& theta,
                                const std::vector<double>& v) {
  KahanSum s;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    double diff = theta[j] - v[j];
    s.add(0.5 * diff * diff);
  }
  return s.value();
}

double simulate_lipschitz(double r, std::int64_t d, double B) {
  return 3.0 * r + std::sqrt(static_cast<double>(d)) * B;
}

double simulate_loss_range(double r, std::int64_t d, double B) {
  // Quadratic term in [0, (3r/2)^2 / 2]; linear perturbation within
  // +- sqrt(d) B (3r/2) over the ball of radius r around the origin.
  double reach = 1.5 * r;
  return 0.5 * reach * reach + 2.0 * std::sqrt(static_cast<double>(d)) * B * reach;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string csv_cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

SolverConfig solver_config(const HarnessOptions& opts) {
  SolverConfig config;
  config.max_iter = opts.max_iter;
  return config;
}

std::vector<double> sim_target(std::int64_t d, double r) {
  return std::vector<double>(static_cast<std::size_t>(d),
                             r / (2.0 * std::sqrt(static_cast<double>(d))));
}

struct CellStats {
  std::vector<double> risk_erm, risk_rob;
  std::vector<std::int64_t> covered;
};

void append_aggregate(std::vector<ReportRow>& rows, const ReportRow& prototype,
                      const CellStats& cell, bool with_ttest, bool with_coverage,
                      double erm_bad_threshold = std::numeric_limits<double>::quiet_NaN(),
                      double rob_good_threshold = std::numeric_limits<double>::quiet_NaN()) {
  ReportRow agg = prototype;
  agg.replication = -1;
  agg.status_erm.clear();
  agg.status_rob.clear();
  agg.cert_upper = ReportRow::nan_value();
  agg.coverage_flag = ReportRow::nan_value();
  if (!cell.risk_erm.empty()) {
    agg.risk_erm = sample_mean(cell.risk_erm);
    agg.var_erm = sample_variance(cell.risk_erm, 1);
  }
  if (!cell.risk_rob.empty()) {
    agg.risk_rob = sample_mean(cell.risk_rob);
    agg.var_rob = sample_variance(cell.risk_rob, 1);
  }
  if (with_ttest && cell.risk_erm.size() == cell.risk_rob.size() &&
      cell.risk_erm.size() >= 2) {
    PairedTTest tt = paired_t_test_greater(cell.risk_erm, cell.risk_rob);
    agg.t_statistic = tt.t;
    agg.p_value = tt.p_one_sided;
  }
  if (with_coverage && !cell.covered.empty()) {
    std::int64_t hits = 0;
    for (auto c : cell.covered) hits += c;
    BinomialCI ci = binomial_ci95(hits, static_cast<std::int64_t>(cell.covered.size()));
    agg.coverage_fraction = ci.fraction;
    agg.coverage_lo = ci.lo;
    agg.coverage_hi = ci.hi;
  }
  if (!std::isnan(erm_bad_threshold) && !cell.risk_erm.empty()) {
    std::int64_t bad = 0;
    for (double rsk : cell.risk_erm) bad += rsk >= erm_bad_threshold ? 1 : 0;
    agg.prob_erm_ge_delta = static_cast<double>(bad) / static_cast<double>(cell.risk_erm.size());
  }
  if (!std::isnan(rob_good_threshold) && !cell.risk_rob.empty()) {
    std::int64_t good = 0;
    for (double rsk : cell.risk_rob) good += rsk <= rob_good_threshold ? 1 : 0;
    agg.prob_rob_le_bound = static_cast<double>(good) / static_cast<double>(cell.risk_rob.size());
  }
  rows.push_back(std::move(agg));
}

}  // namespace

ExperimentReport run_simulate(const SimulateConfig& config) {
  if (config.reps < 2) throw ConfigError("simulate needs reps >= 2");
  if (config.n_list.empty() || config.B_list.empty()) {
    throw ConfigError("simulate needs nonempty n and B lists");
  }
  if (config.d < 1 || !(config.r > 0.0)) throw ConfigError("simulate needs d >= 1, r > 0");

  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> v = sim_target(config.d, config.r);
  LossModel model = LossModel::quad_linear_perturb(v);
  ConstraintSet set = ConstraintSet::l2_ball(config.r);
  SolverConfig solver = solver_config(config.opts);

  struct Outcome {
    double risk_erm, risk_rob, cert_upper;
    std::string status_erm, status_rob;
  };
  std::int64_t cells = static_cast<std::int64_t>(config.n_list.size() * config.B_list.size());
  std::vector<Outcome> outcomes(static_cast<std::size_t>(cells * config.reps));

  auto run_one = [&](std::int64_t task) {
    std::int64_t cell = task / config.reps;
    std::int64_t rep = task % config.reps;
    std::int64_t n = config.n_list[static_cast<std::size_t>(cell) / config.B_list.size()];
    double B = config.B_list[static_cast<std::size_t>(cell) % config.B_list.size()];
    Outcome& out = outcomes[static_cast<std::size_t>(task)];
    try {
      Dataset data = gen_uniform_cube(
          n, config.d, B, derive_seed(config.seed, static_cast<std::uint64_t>(cell),
                                      static_cast<std::uint64_t>(rep)));
      double rho = config.rho_fixed
                       ? config.rho_value
                       : rho_for_coverage(config.delta, config.d, n, 2.0 * config.r,
                                          simulate_lipschitz(config.r, config.d, B));
      FitResult erm = minimize_erm(model, data, set, solver);
      RobustObjective objective(model, data, rho, config.opts.solver_tol);
      FitResult rob = minimize(objective, set, solver);
      out.risk_erm = simulate_population_risk(erm.theta_hat, v);
      out.risk_rob = simulate_population_risk(rob.theta_hat, v);
      Certificate cert = certificate(objective, rob.theta_hat,
                                     simulate_loss_range(config.r, config.d, B));
      out.cert_upper = cert.upper_bound;
      out.status_erm = to_string(erm.status);
      out.status_rob = to_string(rob.status);
    } catch (const Error& e) {
      out.risk_erm = out.risk_rob = out.cert_upper = ReportRow::nan_value();
      out.status_erm = out.status_rob = std::string("error:") + e.what();
    }
  };
  parallel_for(cells * config.reps, resolve_threads(config.opts.threads), run_one);

  ExperimentReport report;
  report.seed = config.seed;
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    std::int64_t n = config.n_list[static_cast<std::size_t>(cell) / config.B_list.size()];
    double B = config.B_list[static_cast<std::size_t>(cell) % config.B_list.size()];
    double rho = config.rho_fixed
                     ? config.rho_value
                     : rho_for_coverage(config.delta, config.d, n, 2.0 * config.r,
                                        simulate_lipschitz(config.r, config.d, B));
    ReportRow proto;
    proto.experiment = "simulate";
    proto.n = n;
    proto.d = config.d;
    proto.param_name = "B";
    proto.param_value = B;
    proto.rho = rho;
    proto.constraint = set.describe();
    CellStats stats;
    for (std::int64_t rep = 0; rep < config.reps; ++rep) {
      const Outcome& out = outcomes[static_cast<std::size_t>(cell * config.reps + rep)];
      ReportRow row = proto;
      row.replication = rep;
      row.risk_erm = out.risk_erm;
      row.risk_rob = out.risk_rob;
      row.cert_upper = out.cert_upper;
      row.status_erm = out.status_erm;
      row.status_rob = out.status_rob;
      report.rows.push_back(std::move(row));
      if (!std::isnan(out.risk_erm) && !std::isnan(out.risk_rob)) {
        stats.risk_erm.push_back(out.risk_erm);
        stats.risk_rob.push_back(out.risk_rob);
      }
    }
    append_aggregate(report.rows, proto, stats, /*with_ttest=*/true,
                     /*with_coverage=*/false);
  }
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

ExperimentReport run_median(const MedianConfig& config) {
  if (config.reps < 100) throw ConfigError("median needs reps >= 100");
  if (config.n_list.empty()) throw ConfigError("median needs a nonempty n list");

  auto t0 = std::chrono::steady_clock::now();
  LossModel model = LossModel::absolute_median();
  ConstraintSet set = ConstraintSet::box({-1.0}, {1.0});
  SolverConfig solver = solver_config(config.opts);

  struct Outcome {
    double risk_erm, risk_rob;
    std::string status_erm, status_rob;
  };
  auto cells = static_cast<std::int64_t>(config.n_list.size());
  std::vector<Outcome> outcomes(static_cast<std::size_t>(cells * config.reps));

  auto run_one = [&](std::int64_t task) {
    std::int64_t cell = task / config.reps;
    std::int64_t rep = task % config.reps;
    std::int64_t n = config.n_list[static_cast<std::size_t>(cell)];
    double delta = 1.0 / std::sqrt(static_cast<double>(n));
    double rho = 3.0 * std::log(static_cast<double>(n));
    Outcome& out = outcomes[static_cast<std::size_t>(task)];
    try {
      Dataset data = gen_median_data(
          n, delta, derive_seed(config.seed, static_cast<std::uint64_t>(cell),
                                static_cast<std::uint64_t>(rep)));
      FitResult erm = minimize_erm(model, data, set, solver);
      RobustObjective objective(model, data, rho, config.opts.solver_tol);
      FitResult rob = minimize(objective, set, solver);
      out.risk_erm = median_population_risk(erm.theta_hat[0], delta);
      out.risk_rob = median_population_risk(rob.theta_hat[0], delta);
      out.status_erm = to_string(erm.status);
      out.status_rob = to_string(rob.status);
    } catch (const Error& e) {
      out.risk_erm = out.risk_rob = ReportRow::nan_value();
      out.status_erm = out.status_rob = std::string("error:") + e.what();
    }
  };
  parallel_for(cells * config.reps, resolve_threads(config.opts.threads), run_one);

  ExperimentReport report;
  report.seed = config.seed;
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    std::int64_t n = config.n_list[static_cast<std::size_t>(cell)];
    double delta = 1.0 / std::sqrt(static_cast<double>(n));
    double rho = 3.0 * std::log(static_cast<double>(n));
    ReportRow proto;
    proto.experiment = "median";
    proto.n = n;
    proto.d = 1;
    proto.param_name = "delta";
    proto.param_value = delta;
    proto.rho = rho;
    proto.constraint = set.describe();
    CellStats stats;
    for (std::int64_t rep = 0; rep < config.reps; ++rep) {
      const Outcome& out = outcomes[static_cast<std::size_t>(cell * config.reps + rep)];
      ReportRow row = proto;
      row.replication = rep;
      row.risk_erm = out.risk_erm;
      row.risk_rob = out.risk_rob;
      row.status_erm = out.status_erm;
      row.status_rob = out.status_rob;
      report.rows.push_back(std::move(row));
      if (!std::isnan(out.risk_erm) && !std::isnan(out.risk_rob)) {
        stats.risk_erm.push_back(out.risk_erm);
        stats.risk_rob.push_back(out.risk_rob);
      }
    }
    double bound = 45.0 * std::log(static_cast<double>(n)) / static_cast<double>(n);
    append_aggregate(report.rows, proto, stats, /*with_ttest=*/false,
                     /*with_coverage=*/false, delta, bound);
  }
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

ExperimentReport run_coverage(const CoverageConfig& config) {
  if (config.reps < 100) throw ConfigError("coverage needs reps >= 100");
  if (config.d < 1 || config.n < 1) throw ConfigError("coverage needs d, n >= 1");
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw ConfigError("delta must be in (0, 1)");
  }

  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> v = sim_target(config.d, config.r);
  LossModel model = LossModel::quad_linear_perturb(v);
  ConstraintSet set = ConstraintSet::l2_ball(config.r);
  SolverConfig solver = solver_config(config.opts);
  double rho = rho_for_coverage(config.delta, config.d, config.n, 2.0 * config.r,
                                simulate_lipschitz(config.r, config.d, config.B));
  double M = simulate_loss_range(config.r, config.d, config.B);

  struct Outcome {
    double risk_rob, cert_upper;
    int covered;
    std::string status_rob;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(config.reps));

  auto run_one = [&](std::int64_t rep) {
    Outcome& out = outcomes[static_cast<std::size_t>(rep)];
    try {
      Dataset data = gen_uniform_cube(
          config.n, config.d, config.B,
          derive_seed(config.seed, 0, static_cast<std::uint64_t>(rep)));
      RobustObjective objective(model, data, rho, config.opts.solver_tol);
      FitResult rob = minimize(objective, set, solver);
      Certificate cert = certificate(objective, rob.theta_hat, M);
      out.risk_rob = simulate_population_risk(rob.theta_hat, v);
      out.cert_upper = cert.upper_bound;
      out.covered = out.risk_rob <= cert.upper_bound ? 1 : 0;
      out.status_rob = to_string(rob.status);
    } catch (const Error& e) {
      out.risk_rob = out.cert_upper = ReportRow::nan_value();
      out.covered = 0;
      out.status_rob = std::string("error:") + e.what();
    }
  };
  parallel_for(config.reps, resolve_threads(config.opts.threads), run_one);

  ExperimentReport report;
  report.seed = config.seed;
  ReportRow proto;
  proto.experiment = "coverage";
  proto.n = config.n;
  proto.d = config.d;
  proto.param_name = "delta";
  proto.param_value = config.delta;
  proto.rho = rho;
  proto.constraint = set.describe();
  CellStats stats;
  for (std::int64_t rep = 0; rep < config.reps; ++rep) {
    const Outcome& out = outcomes[static_cast<std::size_t>(rep)];
    ReportRow row = proto;
    row.replication = rep;
    row.risk_rob = out.risk_rob;
    row.cert_upper = out.cert_upper;
    row.coverage_flag = out.covered;
    row.status_rob = out.status_rob;
    report.rows.push_back(std::move(row));
    if (!std::isnan(out.risk_rob)) {
      stats.risk_rob.push_back(out.risk_rob);
      stats.covered.push_back(out.covered);
    }
  }
  append_aggregate(report.rows, proto, stats, /*with_ttest=*/false,
                   /*with_coverage=*/true);
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace {

const char* kCsvHeader =
    "experiment,n,d,param,param_value,rho,constraint,replication,risk_erm,"
    "risk_rob,cert_upper,coverage_flag,status_erm,status_rob,var_erm,var_rob,"
    "t_statistic,p_value,coverage_fraction,coverage_lo,coverage_hi,"
    "prob_erm_ge_delta,prob_rob_le_bound";

}  // namespace

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "# dro-var schema v1\n";
  out += "# seed=" + std::to_string(report.seed) + "\n";
  out += kCsvHeader;
  out += '\n';
  for (const ReportRow& row : report.rows) {
    out += row.experiment;
    out += ',' + std::to_string(row.n);
    out += ',' + std::to_string(row.d);
    out += ',' + row.param_name;
    out += ',' + format_double(row.param_value);
    out += ',' + format_double(row.rho);
    out += ',' + row.constraint;
    out += ',' + std::to_string(row.replication);
    out += ',' + csv_cell(row.risk_erm);
    out += ',' + csv_cell(row.risk_rob);
    out += ',' + csv_cell(row.cert_upper);
    out += ',' + csv_cell(row.coverage_flag);
    out += ',' + row.status_erm;
    out += ',' + row.status_rob;
    out += ',' + csv_cell(row.var_erm);
    out += ',' + csv_cell(row.var_rob);
    out += ',' + csv_cell(row.t_statistic);
    out += ',' + csv_cell(row.p_value);
    out += ',' + csv_cell(row.coverage_fraction);
    out += ',' + csv_cell(row.coverage_lo);
    out += ',' + csv_cell(row.coverage_hi);
    out += ',' + csv_cell(row.prob_erm_ge_delta);
    out += ',' + csv_cell(row.prob_rob_le_bound);
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json json_opt(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["schema"] = "dro-var schema v1";
  j["seed"] = report.seed;
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& row : report.rows) {
    nlohmann::json r;
    r["experiment"] = row.experiment;
    r["n"] = row.n;
    r["d"] = row.d;
    r["param"] = row.param_name;
    r["param_value"] = row.param_value;
    r["rho"] = row.rho;
    r["constraint"] = row.constraint;
    r["replication"] = row.replication;
    r["risk_erm"] = json_opt(row.risk_erm);
    r["risk_rob"] = json_opt(row.risk_rob);
    r["cert_upper"] = json_opt(row.cert_upper);
    r["coverage_flag"] = json_opt(row.coverage_flag);
    r["status_erm"] = row.status_erm;
    r["status_rob"] = row.status_rob;
    r["var_erm"] = json_opt(row.var_erm);
    r["var_rob"] = json_opt(row.var_rob);
    r["t_statistic"] = json_opt(row.t_statistic);
    r["p_value"] = json_opt(row.p_value);
    r["coverage_fraction"] = json_opt(row.coverage_fraction);
    r["coverage_lo"] = json_opt(row.coverage_lo);
    r["coverage_hi"] = json_opt(row.coverage_hi);
    r["prob_erm_ge_delta"] = json_opt(row.prob_erm_ge_delta);
    r["prob_rob_le_bound"] = json_opt(row.prob_rob_le_bound);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << contents;
  if (!out) throw IoError("failed writing output file: " + path);
}

}  // namespace dro
