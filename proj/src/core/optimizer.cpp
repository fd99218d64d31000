#include "core/optimizer.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace dro {

void SolverConfig::validate() const {
  if (max_iter < 1) throw ConfigError("max_iter must be positive");
  if (!(grad_map_tol > 0.0)) throw ConfigError("grad_map_tol must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must be in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("backtrack must be in (0,1)");
  if (!(init_step > 0.0)) throw ConfigError("init_step must be positive");
  if (max_backtracks < 1) throw ConfigError("max_backtracks must be positive");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged_gradient: return "converged_gradient";
    case SolveStatus::converged_no_progress: return "converged_no_progress";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

namespace {

double step_distance_sq(const std::vector<double>& a, const std::vector<double>& b) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    s.add(diff * diff);
  }
  return s.value();
}

std::vector<double> step_candidate(const std::vector<double>& theta,
                                   const std::vector<double>& grad, double s,
                                   const ConstraintSet& set) {
  std::vector<double> moved(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) moved[i] = theta[i] - s * grad[i];
  return project(moved, set);
}

}  // namespace

FitResult minimize(const RobustObjective& objective, const ConstraintSet& set,
                   const SolverConfig& config, const std::vector<double>* theta0) {
  config.validate();

  std::vector<double> theta(static_cast<std::size_t>(objective.model.dim), 0.0);
  if (theta0 != nullptr) {
    if (theta0->size() != theta.size()) throw InputError("theta0 dimension mismatch");
    theta = *theta0;
  }
  theta = project(theta, set);

  FitResult result;
  auto [eval, grad] = robust_value_and_gradient(objective, theta);
  double f = eval.value;
  result.objective_trace.push_back(f);
  result.final_weights = std::move(eval.solution);
  result.status = SolveStatus::max_iterations;

  double prev_step = config.init_step;
  for (std::int64_t iter = 0; iter < config.max_iter; ++iter) {
    double s = std::min(config.init_step, 2.0 * prev_step);
    bool accepted = false;
    bool moved = false;
    std::vector<double> candidate;
    RobustEvaluation cand_eval;
    double dist_sq = 0.0;
    for (std::int64_t bt = 0; bt <= config.max_backtracks; ++bt) {
      candidate = step_candidate(theta, grad, s, set);
      dist_sq = step_distance_sq(theta, candidate);
      if (dist_sq == 0.0) {
        // Projection fixed point: the gradient mapping vanishes at this step.
        accepted = true;
        break;
      }
      bool ok = false;
      try {
        cand_eval = robust_objective_value(objective, candidate);
        ok = std::isfinite(cand_eval.value);
      } catch (const InputError&) {
        ok = false;  // overflowed losses: shrink the step
      }
      if (ok && cand_eval.value <= f - config.armijo_c * dist_sq / s) {
        accepted = true;
        moved = true;
        break;
      }
      s *= config.backtrack;
    }

    if (!accepted) {
      result.status = SolveStatus::line_search_failure;
      break;
    }

    double grad_map = std::sqrt(dist_sq) / s;
    result.iterations = iter + 1;
    prev_step = s;
    if (moved) {
      theta = std::move(candidate);
      f = cand_eval.value;
      result.objective_trace.push_back(f);
      grad = weighted_gradient(objective.model, theta, *objective.data,
                               cand_eval.solution.weights);
      result.final_weights = std::move(cand_eval.solution);
    }

    if (grad_map <= config.grad_map_tol) {
      result.status = SolveStatus::converged_gradient;
      break;
    }
    std::size_t len = result.objective_trace.size();
    if (len >= 6) {
      double drop = result.objective_trace[len - 6] - result.objective_trace[len - 1];
      if (drop < 1e-12 * std::max(1.0, std::abs(f))) {
        result.status = SolveStatus::converged_no_progress;
        break;
      }
    }
  }

  result.theta_hat = std::move(theta);
  result.converged = result.status == SolveStatus::converged_gradient ||
                     result.status == SolveStatus::converged_no_progress;
  return result;
}

FitResult minimize_erm(const LossModel& model, const Dataset& data,
                       const ConstraintSet& set, const SolverConfig& config) {
  RobustObjective erm(model, data, 0.0);
  return minimize(erm, set, config);
}

}  // namespace dro
