// dro-var command line: experiment harness and solver probes over the
// drovar C API.
#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drovar.h"

namespace {

int fail(int code) {
  std::cerr << "error: " << drovar_last_error() << "\n";
  // Invalid values on the command line are config errors from the user's
  // point of view; the CLI exit codes are 0/2/3/4/5.
  if (code == DROVAR_ERR_INPUT) return 4;
  return code == 0 ? 1 : code;
}

std::int64_t env_threads_default() { return 0; }  // 0 lets the library resolve

struct CommonFlags {
  std::uint64_t seed = 1;
  std::int64_t threads = env_threads_default();
  double tol = 1e-10;
  std::int64_t max_iter = 1000;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "RNG seed");
  cmd->add_option("--threads", flags.threads,
                  "worker threads (0: DRO_VAR_THREADS env or hardware)");
  cmd->add_option("--tol", flags.tol, "inner solver tolerance");
  cmd->add_option("--max-iter", flags.max_iter, "outer iteration cap");
}

std::vector<double> parse_inline_values(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dro-var: variance-regularized (distributionally robust) risk "
               "minimization over chi-square balls"};
  app.require_subcommand(1);

  // ---------------------------------------------------------------- simulate
  auto* simulate = app.add_subcommand(
      "simulate", "quadratic loss with linear perturbation, ERM vs robust");
  CommonFlags sim_flags;
  std::vector<std::int64_t> sim_n{100, 1000};
  std::vector<double> sim_B{0.01, 1.0};
  std::int64_t sim_d = 10, sim_reps = 100;
  double sim_r = 10.0;
  std::string sim_rho = "coverage:0.05";
  std::string sim_out = "simulate.csv", sim_json;
  simulate->add_option("--d", sim_d, "dimension");
  simulate->add_option("--r", sim_r, "l2 constraint radius");
  simulate->add_option("--n", sim_n, "sample sizes")->delimiter(',');
  simulate->add_option("--B", sim_B, "noise scales")->delimiter(',');
  simulate->add_option("--reps", sim_reps, "replications per cell");
  simulate->add_option("--rho", sim_rho, "fixed:VALUE or coverage:DELTA");
  simulate->add_option("--out", sim_out, "CSV output path");
  simulate->add_option("--json", sim_json, "optional JSON output path");
  add_common(simulate, sim_flags);

  // ------------------------------------------------------------------ median
  auto* median = app.add_subcommand(
      "median", "three-point median estimation, ERM vs robust");
  CommonFlags med_flags;
  std::vector<std::int64_t> med_n{100};
  std::int64_t med_reps = 2000;
  std::string med_out = "median.csv", med_json;
  median->add_option("--n", med_n, "sample sizes")->delimiter(',');
  median->add_option("--reps", med_reps, "replications per n");
  median->add_option("--out", med_out, "CSV output path");
  median->add_option("--json", med_json, "optional JSON output path");
  add_common(median, med_flags);

  // --------------------------------------------------------------- coverage
  auto* coverage = app.add_subcommand(
      "coverage", "certificate coverage of the exact population risk");
  CommonFlags cov_flags;
  std::int64_t cov_d = 10, cov_n = 1000, cov_reps = 200;
  double cov_r = 10.0, cov_B = 1.0, cov_delta = 0.05;
  std::string cov_out = "coverage.csv", cov_json;
  coverage->add_option("--d", cov_d, "dimension");
  coverage->add_option("--r", cov_r, "l2 constraint radius");
  coverage->add_option("--B", cov_B, "noise scale");
  coverage->add_option("--n", cov_n, "sample size");
  coverage->add_option("--reps", cov_reps, "replications");
  coverage->add_option("--delta", cov_delta, "target miss probability");
  coverage->add_option("--out", cov_out, "CSV output path");
  coverage->add_option("--json", cov_json, "optional JSON output path");
  add_common(coverage, cov_flags);

  // --------------------------------------------------------------------- fit
  auto* fit = app.add_subcommand("fit", "single robust fit on a dataset file");
  CommonFlags fit_flags;
  std::string fit_data, fit_format = "svmlight", fit_loss = "logistic";
  std::string fit_constraint = "none", fit_out = "fit.json";
  double fit_rho = 0.0, fit_cert_range = 0.0;
  bool fit_add_bias = false;
  fit->add_option("--data", fit_data, "dataset path")->required();
  fit->add_option("--format", fit_format, "svmlight or csv");
  fit->add_option("--loss", fit_loss, "logistic | squared | absolute_median");
  fit->add_option("--rho", fit_rho, "robustness radius (0 = ERM)");
  fit->add_option("--constraint", fit_constraint,
                  "none | l2:R | l1:R | en:A1,A2,R | box:LO,HI");
  fit->add_option("--cert-range", fit_cert_range,
                  "a-priori loss range bound M for the certificate");
  fit->add_flag("--add-bias", fit_add_bias, "append a constant-1 feature");
  fit->add_option("--out", fit_out, "JSON output path");
  add_common(fit, fit_flags);

  // ------------------------------------------------------------------- probe
  auto* probe = app.add_subcommand(
      "probe", "solve one worst-case distribution problem");
  CommonFlags probe_flags;
  std::string probe_z, probe_z_file, probe_out;
  double probe_rho = 1.0;
  std::int64_t probe_gen_n = 0;
  bool probe_stats_only = false;
  probe->add_option("--z", probe_z, "inline losses, comma separated");
  probe->add_option("--z-file", probe_z_file, "file with one loss per line");
  probe->add_option("--gen-n", probe_gen_n,
                    "generate N uniform[-1,1) losses from --seed instead");
  probe->add_option("--rho", probe_rho, "chi-square budget");
  probe->add_option("--out", probe_out, "JSON output path (default stdout)");
  probe->add_flag("--stats-only", probe_stats_only,
                  "omit the weight array from the JSON");
  add_common(probe, probe_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  if (simulate->parsed()) {
    drovar_simulate_config cfg{};
    cfg.d = sim_d;
    cfg.r = sim_r;
    cfg.n_list = sim_n.data();
    cfg.n_count = static_cast<std::int64_t>(sim_n.size());
    cfg.B_list = sim_B.data();
    cfg.B_count = static_cast<std::int64_t>(sim_B.size());
    cfg.reps = sim_reps;
    auto colon = sim_rho.find(':');
    std::string rule = sim_rho.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : sim_rho.substr(colon + 1);
    if (rule == "fixed") {
      cfg.rho_fixed = 1;
      cfg.rho_value = arg.empty() ? 0.0 : std::atof(arg.c_str());
    } else if (rule == "coverage") {
      cfg.rho_fixed = 0;
      cfg.delta = arg.empty() ? 0.05 : std::atof(arg.c_str());
    } else {
      std::cerr << "error: bad --rho rule '" << sim_rho << "'\n";
      return 4;
    }
    cfg.seed = sim_flags.seed;
    cfg.threads = sim_flags.threads;
    cfg.solver_tol = sim_flags.tol;
    cfg.max_iter = sim_flags.max_iter;
    int rc = drovar_run_simulate(&cfg, sim_out.c_str(),
                                 sim_json.empty() ? nullptr : sim_json.c_str());
    if (rc != DROVAR_OK) return fail(rc);
    std::cout << "wrote " << sim_out << "\n";
    return 0;
  }

  if (median->parsed()) {
    drovar_median_config cfg{};
    cfg.n_list = med_n.data();
    cfg.n_count = static_cast<std::int64_t>(med_n.size());
    cfg.reps = med_reps;
    cfg.seed = med_flags.seed;
    cfg.threads = med_flags.threads;
    cfg.solver_tol = med_flags.tol;
    cfg.max_iter = med_flags.max_iter;
    int rc = drovar_run_median(&cfg, med_out.c_str(),
                               med_json.empty() ? nullptr : med_json.c_str());
    if (rc != DROVAR_OK) return fail(rc);
    std::cout << "wrote " << med_out << "\n";
    return 0;
  }

  if (coverage->parsed()) {
    drovar_coverage_config cfg{};
    cfg.d = cov_d;
    cfg.r = cov_r;
    cfg.B = cov_B;
    cfg.n = cov_n;
    cfg.reps = cov_reps;
    cfg.delta = cov_delta;
    cfg.seed = cov_flags.seed;
    cfg.threads = cov_flags.threads;
    cfg.solver_tol = cov_flags.tol;
    cfg.max_iter = cov_flags.max_iter;
    int rc = drovar_run_coverage(&cfg, cov_out.c_str(),
                                 cov_json.empty() ? nullptr : cov_json.c_str());
    if (rc != DROVAR_OK) return fail(rc);
    std::cout << "wrote " << cov_out << "\n";
    return 0;
  }

  if (fit->parsed()) {
    drovar_dataset* data = nullptr;
    int rc = drovar_dataset_load(fit_data.c_str(), fit_format.c_str(),
                                 fit_add_bias ? 1 : 0, &data);
    if (rc != DROVAR_OK) return fail(rc);
    drovar_fit_config cfg;
    drovar_fit_config_init(&cfg);
    cfg.max_iter = fit_flags.max_iter;
    cfg.solver_tol = fit_flags.tol;
    cfg.cert_range = fit_cert_range;
    drovar_fit* result = nullptr;
    rc = drovar_fit_run(data, fit_loss.c_str(), fit_rho, fit_constraint.c_str(),
                        &cfg, &result);
    if (rc != DROVAR_OK) {
      drovar_dataset_free(data);
      return fail(rc);
    }
    rc = drovar_fit_write_json(result, fit_out.c_str());
    if (rc != DROVAR_OK) {
      drovar_fit_free(result);
      drovar_dataset_free(data);
      return fail(rc);
    }
    std::cout << "wrote " << fit_out << " (objective "
              << drovar_fit_objective(result) << ", status "
              << drovar_fit_status(result) << ")\n";
    bool failed = std::string(drovar_fit_status(result)) == "line_search_failure";
    drovar_fit_free(result);
    drovar_dataset_free(data);
    return failed ? 5 : 0;
  }

  if (probe->parsed()) {
    std::vector<double> z;
    if (probe_gen_n > 0) {
      // SplitMix64 benchmark workload: uniform on [-1, 1), deterministic per seed.
      z.resize(static_cast<std::size_t>(probe_gen_n));
      std::uint64_t state = probe_flags.seed;
      for (auto& v : z) {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t x = state;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        x ^= x >> 31;
        v = 2.0 * (static_cast<double>(x >> 11) * 0x1.0p-53) - 1.0;
      }
    } else if (!probe_z_file.empty()) {
      std::ifstream in(probe_z_file);
      if (!in) {
        std::cerr << "error: cannot open " << probe_z_file << "\n";
        return 2;
      }
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        try {
          z.push_back(std::stod(line));
        } catch (const std::exception&) {
          std::cerr << "error: bad loss value '" << line << "'\n";
          return 3;
        }
      }
    } else if (!probe_z.empty()) {
      try {
        z = parse_inline_values(probe_z);
      } catch (const std::exception&) {
        std::cerr << "error: bad --z list\n";
        return 3;
      }
    } else {
      std::cerr << "error: need --z, --z-file, or --gen-n\n";
      return 4;
    }

    auto t0 = std::chrono::steady_clock::now();
    drovar_solution* sol = nullptr;
    int rc = drovar_worst_case(z.data(), static_cast<std::int64_t>(z.size()),
                               probe_rho, probe_flags.tol, &sol);
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rc != DROVAR_OK) return fail(rc);

    std::string target = probe_out.empty() ? std::string("/dev/stdout") : probe_out;
    rc = drovar_solution_write_json(sol, probe_rho, probe_stats_only ? 0 : 1,
                                    target.c_str());
    if (rc != DROVAR_OK) {
      drovar_solution_free(sol);
      return fail(rc);
    }
    if (!probe_out.empty()) std::cout << "wrote " << probe_out << "\n";
    std::fprintf(stderr, "solve_time_sec=%.6f n=%zu value=%.12g\n", secs,
                 z.size(), drovar_solution_value(sol));
    drovar_solution_free(sol);
    return 0;
  }

  return 0;
}
