#include "core/risk.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace dro {

RobustObjective::RobustObjective(LossModel m, const Dataset& d, double rho_,
                                 double solver_tol_)
    : model(std::move(m)), data(&d), rho(rho_), solver_tol(solver_tol_) {
  validate_radius(rho);
  if (!(solver_tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (d.examples.empty()) throw InputError("dataset is empty");
}

RobustEvaluation robust_objective_value(const RobustObjective& obj,
                                        const std::vector<double>& theta) {
  LossVector z = batch_losses(obj.model, theta, *obj.data);
  RobustEvaluation out;
  out.solution = worst_case_distribution(z, obj.rho, obj.solver_tol);
  out.value = out.solution.value;
  return out;
}

std::vector<double> robust_gradient(const RobustObjective& obj,
                                    const std::vector<double>& theta) {
  RobustEvaluation eval = robust_objective_value(obj, theta);
  return weighted_gradient(obj.model, theta, *obj.data, eval.solution.weights);
}

std::pair<RobustEvaluation, std::vector<double>> robust_value_and_gradient(
    const RobustObjective& obj, const std::vector<double>& theta) {
  RobustEvaluation eval = robust_objective_value(obj, theta);
  auto grad = weighted_gradient(obj.model, theta, *obj.data, eval.solution.weights);
  return {std::move(eval), std::move(grad)};
}

double rho_for_coverage(double delta, std::int64_t d, std::int64_t n, double D,
                        double L) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0, 1)");
  if (d < 0) throw ConfigError("d must be nonnegative");
  if (n < 1) throw ConfigError("n must be positive");
  if (!(D > 0.0) || !(L > 0.0)) throw ConfigError("D and L must be positive");
  double base = 2.0 * static_cast<double>(n) * D * L;
  if (!(base > 0.0)) throw ConfigError("2nDL must be positive");
  return std::log(2.0 / delta) + static_cast<double>(d) * std::log(base);
}

Certificate certificate(const RobustObjective& obj, const std::vector<double>& theta,
                        double M, bool range_is_apriori) {
  if (!(M > 0.0)) throw ConfigError("loss range bound M must be positive");
  LossVector losses = batch_losses(obj.model, theta, *obj.data);
  if (M < losses.range()) {
    throw ConfigError("loss range bound M is below the observed range");
  }
  Certificate cert;
  cert.robust_value = worst_case_distribution(losses, obj.rho, obj.solver_tol).value;
  auto n = static_cast<double>(obj.data->n());
  cert.loss_range = M;
  cert.rho = obj.rho;
  cert.n = obj.data->n();
  cert.range_is_apriori = range_is_apriori;
  cert.slack = 11.0 * M * obj.rho / (3.0 * n) +
               (2.0 * M / n) * (1.0 + std::sqrt(obj.rho / n));
  cert.upper_bound = cert.robust_value + cert.slack;
  return cert;
}

BiasEstimate bias_term(const LossModel& model, const Dataset& data,
                       const std::vector<double>& theta) {
  if (data.examples.empty()) throw InputError("dataset is empty");
  auto n = data.examples.size();
  auto nd = static_cast<double>(n);

  std::vector<double> losses;
  losses.reserve(n);
  std::vector<double> grad_mean(theta.size(), 0.0);
  std::vector<std::vector<double>> grads;
  grads.reserve(n);
  for (const Example& ex : data.examples) {
    losses.push_back(loss_value(model, theta, ex));
    grads.push_back(loss_gradient(model, theta, ex));
    for (std::size_t j = 0; j < theta.size(); ++j) grad_mean[j] += grads.back()[j] / nd;
  }
  double loss_mean = mean(losses);
  KahanSum var_acc;
  for (double l : losses) {
    double c = l - loss_mean;
    var_acc.add(c * c);
  }
  double loss_var = var_acc.value() / nd;

  BiasEstimate out;
  out.b_hat.assign(theta.size(), 0.0);
  if (loss_var <= 0.0) return out;
  double sd = std::sqrt(loss_var);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    KahanSum cov;
    for (std::size_t i = 0; i < n; ++i) {
      cov.add((grads[i][j] - grad_mean[j]) * (losses[i] - loss_mean));
    }
    out.b_hat[j] = cov.value() / nd / sd;
  }
  return out;
}

}  // namespace dro
