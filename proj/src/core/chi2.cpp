#include "core/chi2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace dro {

LossVector::LossVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InputError("loss vector must be nonempty");
  KahanSum s;
  min_ = std::numeric_limits<double>::infinity();
  max_ = -min_;
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("loss vector has non-finite entry");
    s.add(v);
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
  mean_ = s.value() / static_cast<double>(values_.size());
  KahanSum sq;
  for (double v : values_) {
    double c = v - mean_;
    sq.add(c * c);
  }
  variance_ = std::max(0.0, sq.value() / static_cast<double>(values_.size()));
}

const char* to_string(FastPath path) {
  switch (path) {
    case FastPath::degenerate_uniform: return "degenerate_uniform";
    case FastPath::closed_form_interior: return "closed_form_interior";
    case FastPath::dual_bisection: return "dual_bisection";
    case FastPath::point_mass: return "point_mass";
  }
  return "unknown";
}

void validate_radius(double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw InputError("rho must be finite and nonnegative");
  }
}

double expansion_min_ratio(const LossVector& z, double rho) {
  validate_radius(rho);
  double s2 = z.variance();
  if (s2 <= 0.0) return std::numeric_limits<double>::infinity();
  double n = static_cast<double>(z.size());
  return std::sqrt(2.0 * rho) * (z.min() - z.mean()) / std::sqrt(n * s2);
}

bool expansion_condition_holds(const LossVector& z, double rho) {
  return expansion_min_ratio(z, rho) >= -1.0;
}

double variance_expansion_value(const LossVector& z, double rho) {
  validate_radius(rho);
  double n = static_cast<double>(z.size());
  return z.mean() + std::sqrt(2.0 * rho * z.variance() / n);
}

namespace {

// State for evaluating the dual at a fixed multiplier lambda > 0. Losses are
// centered and sorted descending; prefix sums let each evaluation cost
// O(log n).
struct DualSolver {
  explicit DualSolver(const LossVector& z)
      : n(static_cast<double>(z.size())), shift(z.mean()) {
    sorted = z.values();
    for (double& v : sorted) v -= shift;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    prefix.resize(sorted.size() + 1, 0.0);
    prefix_sq.resize(sorted.size() + 1, 0.0);
    KahanSum s, sq;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      s.add(sorted[i]);
      sq.add(sorted[i] * sorted[i]);
      prefix[i + 1] = s.value();
      prefix_sq[i + 1] = sq.value();
    }
  }

  // Simplex multiplier solving sum_i max(0, 1/n + (z_i - eta)/(lambda n^2)) = 1
  // when exactly the k largest entries are active.
  double eta_for_active(std::size_t k, double lambda) const {
    double kd = static_cast<double>(k);
    return (prefix[k] - lambda * n * (n - kd)) / kd;
  }

  // Finds the active count k for a given lambda by binary search over the
  // sorted breakpoints: entry i is active iff z_(i) + lambda*n > eta(k).
  std::size_t active_count(double lambda) const {
    std::size_t lo = 1, hi = sorted.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;  // candidate: entries 0..mid are active
      double eta = eta_for_active(mid + 1, lambda);
      if (sorted[mid] + lambda * n > eta) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  // g(lambda) = 0.5 * ||n p(lambda) - 1||^2, nonincreasing in lambda.
  double chi2_at(double lambda, std::size_t k) const {
    double kd = static_cast<double>(k);
    double eta = eta_for_active(k, lambda);
    double ssq = prefix_sq[k] - 2.0 * eta * prefix[k] + kd * eta * eta;
    double scale = lambda * n;
    return 0.5 * (ssq / (scale * scale) + (n - kd));
  }

  double chi2_at(double lambda) const { return chi2_at(lambda, active_count(lambda)); }

  double n;
  double shift;
  std::vector<double> sorted;
  std::vector<double> prefix;
  std::vector<double> prefix_sq;
};

// Builds weights in the original (unsorted) ordering at the dual point
// (lambda, eta_centered); clips to zero and renormalizes the last ulps away.
void fill_weights(const LossVector& z, double lambda, double eta_centered,
                  WorstCaseSolution& out) {
  const std::vector<double>& raw = z.values();
  double n = static_cast<double>(raw.size());
  double shift = z.mean();
  out.weights.resize(raw.size());
  KahanSum total;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double w = 1.0 / n + ((raw[i] - shift) - eta_centered) / (lambda * n * n);
    w = std::max(0.0, w);
    out.weights[i] = w;
    total.add(w);
  }
  double t = total.value();
  if (t > 0.0 && t != 1.0) {
    for (double& w : out.weights) w /= t;
  }
}

void finalize(const LossVector& z, double rho, WorstCaseSolution& out) {
  out.value = dot(out.weights, z.values());
  out.expansion_gap = out.value - variance_expansion_value(z, rho);
}

}  // namespace

namespace {

WorstCaseSolution solve(const LossVector& z, double rho, double tol,
                        bool allow_closed_form);

}  // namespace

WorstCaseSolution worst_case_distribution(const LossVector& z, double rho,
                                          double tol) {
  return solve(z, rho, tol, /*allow_closed_form=*/true);
}

WorstCaseSolution worst_case_distribution_dual_path(const LossVector& z,
                                                    double rho, double tol) {
  return solve(z, rho, tol, /*allow_closed_form=*/false);
}

namespace {

WorstCaseSolution solve(const LossVector& z, double rho, double tol,
                        bool allow_closed_form) {
  validate_radius(rho);
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");

  const std::size_t n = z.size();
  const double nd = static_cast<double>(n);
  WorstCaseSolution out;

  // Empirical distribution only, or nothing to reweight.
  if (rho == 0.0 || z.variance() <= 0.0) {
    out.fast_path = FastPath::degenerate_uniform;
    out.weights.assign(n, 1.0 / nd);
    out.lambda = 0.0;
    out.eta = z.mean();
    out.constraint_active = (rho == 0.0);
    finalize(z, rho, out);
    return out;
  }

  // Point mass: uniform weight over the tied maxima minimizes the divergence
  // among maximizers; feasible iff n(n-m)/(2m) <= rho.
  std::size_t m = 0;
  for (double v : z.values()) {
    if (v == z.max()) ++m;
  }
  double md = static_cast<double>(m);
  double point_mass_div = nd * (nd - md) / (2.0 * md);
  if (point_mass_div <= rho) {
    out.fast_path = FastPath::point_mass;
    out.weights.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (z.values()[i] == z.max()) out.weights[i] = 1.0 / md;
    }
    out.lambda = 0.0;
    out.eta = z.max();
    out.constraint_active = point_mass_div >= rho * (1.0 - 1e-12);
    finalize(z, rho, out);
    return out;
  }

  // Interior closed form: p_i = 1/n + sqrt(2 rho) (z_i - mean) / (n sqrt(n s^2)).
  double min_ratio = expansion_min_ratio(z, rho);
  double norm_centered = std::sqrt(nd * z.variance());
  if (allow_closed_form && min_ratio >= -1.0 + 1e-9) {
    out.fast_path = FastPath::closed_form_interior;
    out.weights.resize(n);
    double scale = std::sqrt(2.0 * rho) / (nd * norm_centered);
    for (std::size_t i = 0; i < n; ++i) {
      out.weights[i] = 1.0 / nd + scale * (z.values()[i] - z.mean());
    }
    out.lambda = norm_centered / (nd * std::sqrt(2.0 * rho));
    out.eta = z.mean();
    out.constraint_active = true;
    finalize(z, rho, out);
    return out;
  }

  // Dual bisection on lambda for g(lambda) = rho.
  DualSolver dual(z);
  double lambda0 = norm_centered / (nd * std::sqrt(2.0 * rho));
  double feas_tol = 1e-10 * std::max(1.0, rho);

  // Bracket: g decreasing; find lo with g >= rho and hi with g <= rho.
  double lo = lambda0, hi = lambda0;
  double g0 = dual.chi2_at(lambda0);
  if (g0 > rho) {
    for (int i = 0; i < 200 && dual.chi2_at(hi) > rho; ++i) hi *= 2.0;
  } else {
    for (int i = 0; i < 200 && dual.chi2_at(lo) < rho; ++i) lo *= 0.5;
  }

  double lambda = lambda0;
  for (int iter = 0; iter < 200; ++iter) {
    lambda = 0.5 * (lo + hi);
    std::size_t k = dual.active_count(lambda);
    double g = dual.chi2_at(lambda, k);
    if (g > rho) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    // The duality gap at p(lambda) is lambda * (rho - g); drive it below the
    // requested value accuracy as well as the feasibility tolerance.
    if (std::abs(g - rho) <= feas_tol && lambda * std::abs(g - rho) <= 0.5 * tol) {
      break;
    }
    if (hi - lo <= 1e-12 * hi) break;
  }

  out.fast_path = FastPath::dual_bisection;
  std::size_t k = dual.active_count(lambda);
  double eta_centered = dual.eta_for_active(k, lambda);
  out.lambda = lambda;
  out.eta = eta_centered + dual.shift;
  out.constraint_active = true;
  fill_weights(z, lambda, eta_centered, out);
  finalize(z, rho, out);
  return out;
}

}  // namespace

}  // namespace dro
