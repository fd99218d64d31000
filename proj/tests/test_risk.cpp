#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/risk.hpp"
#include "core/rng.hpp"
#include "support/oracles.hpp"

using dro::bias_term;
using dro::certificate;
using dro::Dataset;
using dro::Example;
using dro::LossModel;
using dro::rho_for_coverage;
using dro::robust_gradient;
using dro::robust_objective_value;
using dro::RobustObjective;

namespace {

Example scalar(double x) {
  Example ex;
  ex.val = {x};
  return ex;
}

Dataset scalar_data(std::vector<double> xs) {
  Dataset data;
  data.d = 1;
  for (double x : xs) data.examples.push_back(scalar(x));
  return data;
}

Dataset logistic_data(dro::RngStream& rng, std::int64_t n, std::int64_t d) {
  Dataset data;
  data.d = d;
  for (std::int64_t i = 0; i < n; ++i) {
    Example ex;
    for (std::int64_t j = 0; j < d; ++j) ex.val.push_back(rng.uniform(-1.0, 1.0));
    ex.label = (rng.next_u64() & 1) ? 1.0 : -1.0;
    data.examples.push_back(std::move(ex));
  }
  return data;
}

}  // namespace

TEST_CASE("rho = 0 gives the empirical mean exactly") {
  dro::RngStream rng(3, 0);
  Dataset data = logistic_data(rng, 40, 3);
  auto model = LossModel::logistic(3);
  RobustObjective obj(model, data, 0.0);
  std::vector<double> theta{0.3, -0.2, 0.7};
  auto eval = robust_objective_value(obj, theta);
  auto z = dro::batch_losses(model, theta, data);
  CHECK(eval.value == doctest::Approx(z.mean()).epsilon(1e-13));
}

TEST_CASE("constant losses keep uniform weights at any rho") {
  Dataset data = scalar_data({2.0, 2.0, 2.0, 2.0});
  auto model = LossModel::absolute_median();
  RobustObjective obj(model, data, 5.0);
  auto eval = robust_objective_value(obj, {0.0});
  CHECK(eval.value == doctest::Approx(0.0).scale(1));
  for (double w : eval.solution.weights) CHECK(w == doctest::Approx(0.25));
}

TEST_CASE("median objective closed form on a two-point sample") {
  Dataset data = scalar_data({1.0, -1.0});
  auto model = LossModel::absolute_median();
  RobustObjective obj(model, data, 0.5);
  auto eval = robust_objective_value(obj, {0.5});
  // losses (-0.5, 0.5): mean 0, variance 0.25, exact expansion applies.
  CHECK(eval.value == doctest::Approx(std::sqrt(2.0 * 0.5 * 0.25 / 2.0)).epsilon(1e-12));
  CHECK(eval.value == doctest::Approx(0.3535533905932738).epsilon(1e-12));
}

TEST_CASE("robust objective is nondecreasing in rho") {
  dro::RngStream rng(7, 0);
  Dataset data = logistic_data(rng, 25, 2);
  auto model = LossModel::logistic(2);
  std::vector<double> theta{0.4, 0.9};
  double prev = -1e300;
  for (double rho : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0}) {
    RobustObjective obj(model, data, rho);
    double value = robust_objective_value(obj, theta).value;
    CHECK(value >= prev - 1e-12);
    prev = value;
  }
}

TEST_CASE("rho = 0 gradient is the average gradient") {
  dro::RngStream rng(11, 0);
  Dataset data = logistic_data(rng, 30, 3);
  auto model = LossModel::logistic(3);
  RobustObjective obj(model, data, 0.0);
  std::vector<double> theta{0.1, 0.2, -0.3};
  auto grad = robust_gradient(obj, theta);
  std::vector<double> manual(3, 0.0);
  for (const auto& ex : data.examples) {
    auto g = dro::loss_gradient(model, theta, ex);
    for (int j = 0; j < 3; ++j) manual[j] += g[j] / static_cast<double>(data.n());
  }
  for (int j = 0; j < 3; ++j) CHECK(grad[j] == doctest::Approx(manual[j]).epsilon(1e-12));
}

TEST_CASE("identical examples give that example's gradient at any rho") {
  Dataset data;
  data.d = 2;
  for (int i = 0; i < 6; ++i) {
    Example ex;
    ex.val = {1.0, -2.0};
    ex.label = 1.0;
    data.examples.push_back(ex);
  }
  auto model = LossModel::logistic(2);
  std::vector<double> theta{0.5, 0.25};
  auto single = dro::loss_gradient(model, theta, data.examples[0]);
  for (double rho : {0.0, 1.0, 50.0}) {
    RobustObjective obj(model, data, rho);
    auto grad = robust_gradient(obj, theta);
    for (int j = 0; j < 2; ++j) CHECK(grad[j] == doctest::Approx(single[j]).epsilon(1e-12));
  }
}

TEST_CASE("Danskin gradient matches finite differences of the robust value") {
  dro::RngStream rng(13, 0);
  auto model = LossModel::logistic(2);
  for (int trial = 0; trial < 25; ++trial) {
    Dataset data = logistic_data(rng, 5, 2);
    std::vector<double> theta{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    RobustObjective obj(model, data, 1.0);
    auto z = dro::batch_losses(model, theta, data);
    if (z.variance() < 1e-4) continue;  // needs a unique maximizer
    auto grad = robust_gradient(obj, theta);
    auto fd = oracles::central_difference_gradient(
        [&](const std::vector<double>& t) {
          return robust_objective_value(obj, t).value;
        },
        theta);
    for (int j = 0; j < 2; ++j) {
      CHECK(grad[j] ==
            doctest::Approx(fd[j]).epsilon(1e-5).scale(std::max(1.0, std::abs(fd[j]))));
    }
  }
}

TEST_CASE("rho_for_coverage closed form") {
  CHECK(rho_for_coverage(0.05, 1, 100, 2.0, 1.0) ==
        doctest::Approx(std::log(40.0) + std::log(400.0)).epsilon(1e-15));
  CHECK(rho_for_coverage(0.05, 1, 100, 2.0, 1.0) ==
        doctest::Approx(9.68034400122192).epsilon(1e-12));
  // 2nDL = 1 kills the second term.
  CHECK(rho_for_coverage(0.1, 3, 1, 0.5, 1.0) == doctest::Approx(std::log(20.0)));
  CHECK(rho_for_coverage(0.05, 0, 100, 2.0, 1.0) == doctest::Approx(std::log(40.0)));
  CHECK_THROWS_AS(rho_for_coverage(0.0, 1, 100, 2.0, 1.0), dro::ConfigError);
  CHECK_THROWS_AS(rho_for_coverage(1.0, 1, 100, 2.0, 1.0), dro::ConfigError);
  CHECK_THROWS_AS(rho_for_coverage(0.05, 1, 100, -2.0, 1.0), dro::ConfigError);
}

TEST_CASE("certificate slack arithmetic") {
  Dataset data = scalar_data({0.0, 1.0, 0.5, 0.25});
  auto model = LossModel::absolute_median();

  // rho = 0: slack reduces to 2M/n.
  RobustObjective erm(model, data, 0.0);
  auto cert0 = certificate(erm, {0.0}, 1.0);
  CHECK(cert0.slack == doctest::Approx(2.0 / 4.0).epsilon(1e-15));
  CHECK(cert0.upper_bound == doctest::Approx(cert0.robust_value + cert0.slack));

  // M = 1, rho = 9, n = 100: slack = 0.33 + 0.02 * 1.3 = 0.356.
  Dataset big = scalar_data(std::vector<double>(100, 0.0));
  big.examples[0].val[0] = 1.0;
  RobustObjective obj(model, big, 9.0);
  auto cert = certificate(obj, {0.0}, 1.0);
  CHECK(cert.slack == doctest::Approx(0.356).epsilon(1e-12));

  CHECK_THROWS_AS(certificate(obj, {0.0}, 0.0), dro::ConfigError);
  CHECK_THROWS_AS(certificate(obj, {0.0}, -2.0), dro::ConfigError);
}

TEST_CASE("certificate slack shrinks with n and grows with rho") {
  auto model = LossModel::absolute_median();
  double prev = 1e300;
  for (std::int64_t n : {10, 100, 1000}) {
    Dataset data = scalar_data(std::vector<double>(static_cast<std::size_t>(n), 0.0));
    data.examples[0].val[0] = 1.0;
    RobustObjective obj(model, data, 4.0);
    auto cert = certificate(obj, {0.0}, 1.0);
    CHECK(cert.slack < prev);
    prev = cert.slack;
  }
}

TEST_CASE("bias term hand example and conventions") {
  // At theta = 0 the squared loss gives l = y^2/2, grad = -y x. The pair
  // below realizes losses (0, 1) and gradients (0, 2), so
  // cov = 0.5, sd = 0.5, bias = 1.
  Dataset data;
  data.d = 1;
  Example a;
  a.val = {1.0};
  a.label = 0.0;
  Example b;
  b.val = {std::sqrt(2.0)};
  b.label = -std::sqrt(2.0);
  data.examples = {a, b};
  auto model = LossModel::squared(1);
  auto est = bias_term(model, data, {0.0});
  REQUIRE(est.b_hat.size() == 1);
  CHECK(est.b_hat[0] == doctest::Approx(1.0).epsilon(1e-12));

  // Constant losses: zero vector by convention.
  Dataset flat = scalar_data({1.0, 1.0, 1.0});
  auto zero = bias_term(LossModel::absolute_median(), flat, {0.0});
  CHECK(zero.b_hat[0] == 0.0);
}

TEST_CASE("bias term matches a naive two-pass oracle") {
  dro::RngStream rng(21, 0);
  Dataset data = logistic_data(rng, 60, 2);
  auto model = LossModel::logistic(2);
  std::vector<double> theta{0.7, -0.4};
  auto est = bias_term(model, data, theta);

  auto n = static_cast<double>(data.n());
  std::vector<double> losses;
  std::vector<std::vector<double>> grads;
  for (const auto& ex : data.examples) {
    losses.push_back(dro::loss_value(model, theta, ex));
    grads.push_back(dro::loss_gradient(model, theta, ex));
  }
  double lm = 0.0;
  for (double l : losses) lm += l / n;
  double var = 0.0;
  for (double l : losses) var += (l - lm) * (l - lm) / n;
  for (int j = 0; j < 2; ++j) {
    double gm = 0.0;
    for (const auto& g : grads) gm += g[j] / n;
    double cov = 0.0;
    for (std::size_t i = 0; i < grads.size(); ++i) {
      cov += (grads[i][j] - gm) * (losses[i] - lm) / n;
    }
    CHECK(est.b_hat[j] == doctest::Approx(cov / std::sqrt(var)).epsilon(1e-10));
  }
}

TEST_CASE("shift invariance of the location objective is exact on dyadic data") {
  // The invariance concerns the pure location loss |theta - x|: shifting
  // data and parameter together reproduces the identical loss vector, so the
  // robust value matches bit for bit. (The median experiment's normalized
  // loss subtracts a per-example |x|, which is anchored at the origin.)
  std::vector<double> xs{-1.0, 0.0, 1.0, 1.0, -1.0, 0.0, 1.0};
  double c = 4.0;
  double rho = 3.0;
  for (double theta : {-0.75, -0.5, 0.0, 0.25, 0.5}) {
    std::vector<double> z, z_shifted;
    for (double x : xs) {
      z.push_back(std::abs(theta - x));
      z_shifted.push_back(std::abs((theta + c) - (x + c)));
    }
    auto base = dro::worst_case_distribution(dro::LossVector(z), rho);
    auto moved = dro::worst_case_distribution(dro::LossVector(z_shifted), rho);
    CHECK(moved.value == base.value);
    CHECK(moved.weights == base.weights);
  }
}

TEST_CASE("logistic robust objective is invariant under A and A^{-T}") {
  dro::RngStream rng(31, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset data = logistic_data(rng, 15, 2);
    // Well-conditioned random A = I + small perturbation.
    double a = 1.0 + 0.3 * rng.uniform(-1.0, 1.0);
    double b = 0.3 * rng.uniform(-1.0, 1.0);
    double c = 0.3 * rng.uniform(-1.0, 1.0);
    double d = 1.0 + 0.3 * rng.uniform(-1.0, 1.0);
    double det = a * d - b * c;
    REQUIRE(std::abs(det) > 0.3);

    Dataset mapped = data;
    for (auto& ex : mapped.examples) {
      double x0 = ex.val[0], x1 = ex.val[1];
      ex.val[0] = a * x0 + b * x1;
      ex.val[1] = c * x0 + d * x1;
    }
    std::vector<double> theta{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    // A^{-T} theta = (1/det) [d, -c; -b, a] theta.
    std::vector<double> theta_mapped{(d * theta[0] - c * theta[1]) / det,
                                     (-b * theta[0] + a * theta[1]) / det};
    auto model = LossModel::logistic(2);
    RobustObjective obj(model, data, 2.0);
    RobustObjective obj_mapped(model, mapped, 2.0);
    double base = robust_objective_value(obj, theta).value;
    double moved = robust_objective_value(obj_mapped, theta_mapped).value;
    CHECK(moved == doctest::Approx(base).epsilon(1e-10));
  }
}
