#include "core/losses.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace dro {

LossModel LossModel::logistic(std::int64_t d) {
  if (d < 1) throw ConfigError("logistic loss needs d >= 1");
  return {Kind::logistic, d, {}};
}

LossModel LossModel::squared(std::int64_t d) {
  if (d < 1) throw ConfigError("squared loss needs d >= 1");
  return {Kind::squared, d, {}};
}

LossModel LossModel::absolute_median() { return {Kind::absolute_median, 1, {}}; }

LossModel LossModel::quad_linear_perturb(std::vector<double> v) {
  if (v.empty() || !all_finite(v)) throw ConfigError("perturbation target must be finite");
  auto d = static_cast<std::int64_t>(v.size());
  return {Kind::quad_linear_perturb, d, std::move(v)};
}

std::string LossModel::name() const {
  switch (kind) {
    case Kind::logistic: return "logistic";
    case Kind::squared: return "squared";
    case Kind::absolute_median: return "absolute_median";
    case Kind::quad_linear_perturb: return "quad_linear_perturb";
  }
  return "unknown";
}

LossModel LossModel::by_name(const std::string& name, std::int64_t d) {
  if (name == "logistic") return logistic(d);
  if (name == "squared") return squared(d);
  if (name == "absolute_median") return absolute_median();
  throw ConfigError("unknown loss: " + name);
}

namespace {

void check_dims(const LossModel& model, const std::vector<double>& theta) {
  if (static_cast<std::int64_t>(theta.size()) != model.dim) {
    throw InputError("parameter dimension mismatch");
  }
}

// Overflow-safe log(1 + exp(-m)).
double logistic_loss(double margin) {
  if (margin >= 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

// d/dm log(1 + exp(-m)) = -sigmoid(-m), computed without overflow.
double logistic_slope(double margin) {
  if (margin >= 0.0) {
    double e = std::exp(-margin);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(margin));
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double require_label(const Example& ex) {
  if (!ex.has_label()) throw InputError("example has no label");
  return ex.label;
}

double scalar_feature(const Example& ex) {
  if (ex.sparse()) {
    return ex.idx.size() == 1 && ex.idx[0] == 0 ? ex.val[0] : 0.0;
  }
  if (ex.val.size() != 1) throw InputError("absolute_median needs scalar examples");
  return ex.val[0];
}

}  // namespace

double loss_value(const LossModel& model, const std::vector<double>& theta,
                  const Example& ex) {
  check_dims(model, theta);
  switch (model.kind) {
    case LossModel::Kind::logistic:
      return logistic_loss(require_label(ex) * ex.dot(theta));
    case LossModel::Kind::squared: {
      double r = ex.dot(theta) - require_label(ex);
      return 0.5 * r * r;
    }
    case LossModel::Kind::absolute_median: {
      double x = scalar_feature(ex);
      return std::abs(theta[0] - x) - std::abs(x);
    }
    case LossModel::Kind::quad_linear_perturb: {
      KahanSum s;
      for (std::size_t j = 0; j < theta.size(); ++j) {
        double diff = theta[j] - model.v[j];
        s.add(0.5 * diff * diff);
      }
      s.add(ex.dot(theta));
      s.add(-ex.dot(model.v));
      return s.value();
    }
  }
  throw ConfigError("unknown loss kind");
}

std::vector<double> loss_gradient(const LossModel& model,
                                  const std::vector<double>& theta,
                                  const Example& ex) {
  check_dims(model, theta);
  std::vector<double> g(theta.size(), 0.0);
  switch (model.kind) {
    case LossModel::Kind::logistic: {
      double y = require_label(ex);
      double slope = logistic_slope(y * ex.dot(theta));
      ex.axpy(slope * y, g);
      break;
    }
    case LossModel::Kind::squared: {
      double r = ex.dot(theta) - require_label(ex);
      ex.axpy(r, g);
      break;
    }
    case LossModel::Kind::absolute_median:
      g[0] = sign0(theta[0] - scalar_feature(ex));
      break;
    case LossModel::Kind::quad_linear_perturb:
      for (std::size_t j = 0; j < theta.size(); ++j) g[j] = theta[j] - model.v[j];
      ex.axpy(1.0, g);
      break;
  }
  return g;
}

LossVector batch_losses(const LossModel& model, const std::vector<double>& theta,
                        const Dataset& data) {
  if (data.examples.empty()) throw InputError("dataset is empty");
  std::vector<double> z;
  z.reserve(data.examples.size());
  for (const Example& ex : data.examples) z.push_back(loss_value(model, theta, ex));
  return LossVector(std::move(z));
}

std::vector<double> weighted_gradient(const LossModel& model,
                                      const std::vector<double>& theta,
                                      const Dataset& data,
                                      std::span<const double> weights) {
  if (weights.size() != data.examples.size()) {
    throw InputError("weight count must match dataset size");
  }
  check_dims(model, theta);
  std::vector<double> g(theta.size(), 0.0);
  switch (model.kind) {
    case LossModel::Kind::logistic:
      for (std::size_t i = 0; i < weights.size(); ++i) {
        const Example& ex = data.examples[i];
        double y = require_label(ex);
        double slope = logistic_slope(y * ex.dot(theta));
        ex.axpy(weights[i] * slope * y, g);
      }
      break;
    case LossModel::Kind::squared:
      for (std::size_t i = 0; i < weights.size(); ++i) {
        const Example& ex = data.examples[i];
        double r = ex.dot(theta) - require_label(ex);
        ex.axpy(weights[i] * r, g);
      }
      break;
    case LossModel::Kind::absolute_median:
      for (std::size_t i = 0; i < weights.size(); ++i) {
        g[0] += weights[i] * sign0(theta[0] - scalar_feature(data.examples[i]));
      }
      break;
    case LossModel::Kind::quad_linear_perturb: {
      // sum_i p_i [(theta - v) + x_i] = (sum_i p_i)(theta - v) + sum_i p_i x_i
      double wsum = sum(weights);
      for (std::size_t j = 0; j < theta.size(); ++j) {
        g[j] = wsum * (theta[j] - model.v[j]);
      }
      for (std::size_t i = 0; i < weights.size(); ++i) {
        data.examples[i].axpy(weights[i], g);
      }
      break;
    }
  }
  return g;
}

}  // namespace dro
