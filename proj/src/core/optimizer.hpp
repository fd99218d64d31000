#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/geometry.hpp"
#include "core/risk.hpp"

namespace dro {

struct SolverConfig {
  std::int64_t max_iter = 1000;
  double grad_map_tol = 1e-8;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double init_step = 1.0;
  std::int64_t max_backtracks = 50;

  void validate() const;
};

enum class SolveStatus {
  converged_gradient,    // gradient mapping below tolerance
  converged_no_progress, // relative decrease < 1e-12 over 5 iterations
  max_iterations,
  line_search_failure,   // no descent step found; typical at kink minimizers
};

const char* to_string(SolveStatus status);

struct FitResult {
  std::vector<double> theta_hat;
  std::vector<double> objective_trace;  // nonincreasing
  std::int64_t iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::max_iterations;
  std::optional<Certificate> cert;
  WorstCaseSolution final_weights;
};

// Projected gradient descent with Armijo backtracking on the projected step.
// The line-search-failure outcome is reported on the result together with the
// final iterate so replication harnesses can record it and move on.
FitResult minimize(const RobustObjective& objective, const ConstraintSet& set,
                   const SolverConfig& config,
                   const std::vector<double>* theta0 = nullptr);

FitResult minimize_erm(const LossModel& model, const Dataset& data,
                       const ConstraintSet& set, const SolverConfig& config);

}  // namespace dro
