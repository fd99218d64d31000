#include "core/fitio.hpp"

#include <cmath>

#include <json.hpp>

#include "core/errors.hpp"

namespace dro {

FitOutput run_fit(const Dataset& data, const FitRequest& request) {
  FitOutput out;
  out.model = LossModel::by_name(request.loss, data.d);
  out.rho = request.rho;
  ConstraintSet set = parse_constraint(request.constraint);
  out.constraint = set.describe();

  RobustObjective objective(out.model, data, request.rho, request.solver_tol);
  out.fit = minimize(objective, set, request.solver);

  LossVector train_losses = batch_losses(out.model, out.fit.theta_hat, data);
  double observed_range = train_losses.range();
  bool apriori = request.cert_range > 0.0;
  double M = apriori ? request.cert_range : observed_range;
  if (apriori && request.cert_range < observed_range) {
    throw ConfigError("certificate range bound is below the observed loss range");
  }
  if (M > 0.0) {
    out.cert = certificate(objective, out.fit.theta_hat, M, apriori);
    out.fit.cert = out.cert;
  }

  bool binary_labels = true;
  for (const Example& ex : data.examples) {
    if (!ex.has_label() || (ex.label != 1.0 && ex.label != -1.0)) {
      binary_labels = false;
      break;
    }
  }
  if (binary_labels) {
    out.train_metrics = binary_report(out.model, out.fit.theta_hat, data);
  }
  return out;
}

namespace {

nlohmann::json sparse_theta(const std::vector<double>& theta) {
  nlohmann::json idx = nlohmann::json::array();
  nlohmann::json val = nlohmann::json::array();
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (theta[j] != 0.0) {
      idx.push_back(j);
      val.push_back(theta[j]);
    }
  }
  nlohmann::json out;
  out["dim"] = theta.size();
  out["idx"] = std::move(idx);
  out["val"] = std::move(val);
  return out;
}

}  // namespace

std::string fit_to_json(const FitOutput& out) {
  nlohmann::json j;
  j["schema"] = "dro-var fit v1";
  j["loss"] = out.model.name();
  j["rho"] = out.rho;
  j["constraint"] = out.constraint;
  j["theta"] = sparse_theta(out.fit.theta_hat);
  j["objective"] = out.fit.objective_trace.back();
  j["iterations"] = out.fit.iterations;
  j["converged"] = out.fit.converged;
  j["status"] = to_string(out.fit.status);
  j["trace"] = out.fit.objective_trace;
  j["final_weights"] = {
      {"fast_path", to_string(out.fit.final_weights.fast_path)},
      {"lambda", out.fit.final_weights.lambda},
      {"eta", out.fit.final_weights.eta},
      {"constraint_active", out.fit.final_weights.constraint_active},
      {"expansion_gap", out.fit.final_weights.expansion_gap},
  };
  if (out.cert) {
    j["certificate"] = {
        {"robust_value", out.cert->robust_value},
        {"slack", out.cert->slack},
        {"upper_bound", out.cert->upper_bound},
        {"loss_range", out.cert->loss_range},
        {"rho", out.cert->rho},
        {"n", out.cert->n},
        {"range_is_apriori", out.cert->range_is_apriori},
    };
  } else {
    j["certificate"] = nullptr;
  }
  if (out.train_metrics) {
    j["train"] = {
        {"risk", out.train_metrics->risk},
        {"error", out.train_metrics->error},
        {"error_pos", out.train_metrics->error_pos},
        {"error_neg", out.train_metrics->error_neg},
        {"n", out.train_metrics->n_eval},
    };
  } else {
    j["train"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string solution_to_json(const WorstCaseSolution& solution, double rho,
                             bool include_weights) {
  nlohmann::json j;
  j["schema"] = "dro-var probe v1";
  j["n"] = solution.weights.size();
  j["rho"] = rho;
  j["value"] = solution.value;
  j["lambda"] = solution.lambda;
  j["eta"] = solution.eta;
  j["constraint_active"] = solution.constraint_active;
  j["fast_path"] = to_string(solution.fast_path);
  j["expansion_gap"] = solution.expansion_gap;
  if (include_weights) {
    j["weights"] = solution.weights;
  } else {
    double wmin = solution.weights.empty() ? 0.0 : solution.weights[0];
    double wmax = wmin, wsum = 0.0;
    for (double w : solution.weights) {
      wmin = std::min(wmin, w);
      wmax = std::max(wmax, w);
      wsum += w;
    }
    j["weights"] = nullptr;
    j["weight_summary"] = {{"min", wmin}, {"max", wmax}, {"sum", wsum}};
  }
  return j.dump(2) + "\n";
}

}  // namespace dro
