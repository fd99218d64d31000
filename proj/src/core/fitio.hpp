#pragma once

#include <optional>
#include <string>

#include "core/metrics.hpp"
#include "core/optimizer.hpp"

namespace dro {

struct FitRequest {
  std::string loss = "logistic";
  double rho = 0.0;
  std::string constraint = "none";
  SolverConfig solver;
  double solver_tol = 1e-10;
  double cert_range = 0.0;  // a-priori M; <= 0 falls back to the observed range
};

struct FitOutput {
  LossModel model;
  FitResult fit;
  std::optional<Certificate> cert;  // absent when the loss range is zero
  std::optional<EvaluationReport> train_metrics;  // labels in {-1,+1} only
  double rho = 0.0;
  std::string constraint;
};

FitOutput run_fit(const Dataset& data, const FitRequest& request);

// Deterministic JSON: fitted parameter in sparse form, metrics, certificate,
// solver telemetry. Never includes wall-clock times.
std::string fit_to_json(const FitOutput& out);

std::string solution_to_json(const WorstCaseSolution& solution, double rho,
                             bool include_weights);

}  // namespace dro
