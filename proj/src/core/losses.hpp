#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/chi2.hpp"
#include "core/data.hpp"

namespace dro {

// The four loss families used by the experiments.
struct LossModel {
  enum class Kind { logistic, squared, absolute_median, quad_linear_perturb };

  Kind kind = Kind::logistic;
  std::int64_t dim = 0;
  std::vector<double> v;  // target of the quadratic/linear-perturbation loss

  static LossModel logistic(std::int64_t d);
  static LossModel squared(std::int64_t d);
  static LossModel absolute_median();
  static LossModel quad_linear_perturb(std::vector<double> v);

  std::string name() const;
  static LossModel by_name(const std::string& name, std::int64_t d);
};

double loss_value(const LossModel& model, const std::vector<double>& theta,
                  const Example& ex);

// (Sub)gradient; sign(0) = 0 at absolute-value kinks.
std::vector<double> loss_gradient(const LossModel& model,
                                  const std::vector<double>& theta,
                                  const Example& ex);

LossVector batch_losses(const LossModel& model, const std::vector<double>& theta,
                        const Dataset& data);

// sum_i weights[i] * grad loss_i(theta); uniform weights give the ERM gradient.
std::vector<double> weighted_gradient(const LossModel& model,
                                      const std::vector<double>& theta,
                                      const Dataset& data,
                                      std::span<const double> weights);

}  // namespace dro
