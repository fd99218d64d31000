#pragma once

#include <cstdint>
#include <vector>

#include "core/chi2.hpp"
#include "core/data.hpp"
#include "core/losses.hpp"

namespace dro {

// The robust objective sup over the chi-square ball of the reweighted
// empirical loss; rho = 0 reduces to plain ERM.
struct RobustObjective {
  LossModel model;
  const Dataset* data = nullptr;
  double rho = 0.0;
  double solver_tol = 1e-12;

  RobustObjective(LossModel m, const Dataset& d, double rho_,
                  double solver_tol_ = 1e-12);
};

struct RobustEvaluation {
  double value = 0.0;
  WorstCaseSolution solution;
};

RobustEvaluation robust_objective_value(const RobustObjective& obj,
                                        const std::vector<double>& theta);

// sum_i p*_i grad loss_i; the exact gradient when the worst-case weights are
// unique, a valid subgradient otherwise.
std::vector<double> robust_gradient(const RobustObjective& obj,
                                    const std::vector<double>& theta);

// Single-pass value + gradient.
std::pair<RobustEvaluation, std::vector<double>> robust_value_and_gradient(
    const RobustObjective& obj, const std::vector<double>& theta);

// rho = log(2/delta) + d log(2 n D L).
double rho_for_coverage(double delta, std::int64_t d, std::int64_t n, double D,
                        double L);

// Data-driven upper confidence bound: robust value plus the explicit
// 11 M rho / (3n) + (2M/n)(1 + sqrt(rho/n)) slack.
struct Certificate {
  double robust_value = 0.0;
  double slack = 0.0;
  double upper_bound = 0.0;
  double loss_range = 0.0;  // M
  double rho = 0.0;
  std::int64_t n = 0;
  bool range_is_apriori = true;  // false when M is just the observed range
};

Certificate certificate(const RobustObjective& obj, const std::vector<double>& theta,
                        double M, bool range_is_apriori = true);

// Plug-in Cov(grad loss, loss) / sqrt(Var loss) with 1/n moments; the zero
// vector when the loss variance vanishes.
struct BiasEstimate {
  std::vector<double> b_hat;
};

BiasEstimate bias_term(const LossModel& model, const Dataset& data,
                       const std::vector<double>& theta);

}  // namespace dro
