#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace dro {

ConstraintSet ConstraintSet::unconstrained() { return {}; }

ConstraintSet ConstraintSet::l2_ball(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("l2 ball radius must be positive");
  ConstraintSet s;
  s.kind = Kind::l2_ball;
  s.radius = r;
  return s;
}

ConstraintSet ConstraintSet::l1_ball(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("l1 ball radius must be positive");
  ConstraintSet s;
  s.kind = Kind::l1_ball;
  s.radius = r;
  return s;
}

ConstraintSet ConstraintSet::elastic_net(double a1, double a2, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("elastic net bound must be positive");
  if (a1 < 0.0 || a2 < 0.0 || a1 + a2 <= 0.0) {
    throw ConfigError("elastic net needs a1, a2 >= 0 with a1 + a2 > 0");
  }
  ConstraintSet s;
  s.kind = Kind::elastic_net_ball;
  s.radius = r;
  s.a1 = a1;
  s.a2 = a2;
  return s;
}

ConstraintSet ConstraintSet::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size()) throw ConfigError("box bounds size mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw ConfigError("box needs lo <= hi");
  }
  ConstraintSet s;
  s.kind = Kind::interval_box;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return s;
}

std::string ConstraintSet::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::unconstrained: os << "none"; break;
    case Kind::l2_ball: os << "l2:" << radius; break;
    case Kind::l1_ball: os << "l1:" << radius; break;
    case Kind::elastic_net_ball: os << "en:" << a1 << "," << a2 << "," << radius; break;
    case Kind::interval_box: os << "box:" << lo[0] << "," << hi[0]; break;
  }
  return os.str();
}

namespace {

// Soft-threshold projection onto {||x||_1 <= r} by sorted prefix sums.
std::vector<double> project_l1(const std::vector<double>& y, double r) {
  if (norm1(y) <= r) return y;
  std::vector<double> mag(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) mag[i] = std::abs(y[i]);
  std::vector<double> sorted = mag;
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<double>());
  KahanSum acc;
  double threshold = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    acc.add(sorted[k]);
    double t = (acc.value() - r) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= t) {
      threshold = t;
      break;
    }
  }
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double shrunk = std::max(0.0, mag[i] - threshold);
    out[i] = std::copysign(shrunk, y[i]);
  }
  return out;
}

std::vector<double> project_l2(const std::vector<double>& y, double r) {
  double nrm = norm2(y);
  if (nrm <= r) return y;
  std::vector<double> out(y.size());
  double scale = r / nrm;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] * scale;
  return out;
}

double elastic_value(const std::vector<double>& x, double a1, double a2) {
  return a1 * norm1(x) + a2 * norm2(x);
}

// KKT form theta = beta * soft(y, lam*a1), beta = 1 - lam*a2/||soft||; the
// constraint value is monotone in lam, so bisect.
std::vector<double> project_elastic(const std::vector<double>& y, double a1,
                                    double a2, double r) {
  if (a1 == 0.0) return project_l2(y, r / a2);
  if (a2 == 0.0) return project_l1(y, r / a1);
  if (elastic_value(y, a1, a2) <= r) return y;

  auto theta_at = [&](double lam) {
    std::vector<double> soft(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      soft[i] = std::copysign(std::max(0.0, std::abs(y[i]) - lam * a1), y[i]);
    }
    double nrm = norm2(soft);
    double beta = nrm > 0.0 ? std::max(0.0, 1.0 - lam * a2 / nrm) : 0.0;
    for (double& v : soft) v *= beta;
    return soft;
  };

  double lam_hi = 0.0;
  for (double v : y) lam_hi = std::max(lam_hi, std::abs(v));
  lam_hi = lam_hi / a1 + 1.0;  // soft() is identically zero here
  double lam_lo = 0.0;
  std::vector<double> theta;
  double val = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    double lam = 0.5 * (lam_lo + lam_hi);
    theta = theta_at(lam);
    val = elastic_value(theta, a1, a2);
    if (std::abs(val - r) <= 1e-12 * r) break;
    if (val > r) {
      lam_lo = lam;
    } else {
      lam_hi = lam;
    }
    if (lam_hi - lam_lo <= 1e-15 * std::max(1.0, lam_hi)) break;
  }
  // Return the feasible side so the result reprojects to itself.
  if (val > r) theta = theta_at(lam_hi);
  return theta;
}

std::vector<double> project_box(const std::vector<double>& y,
                                const std::vector<double>& lo,
                                const std::vector<double>& hi) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double l = lo.size() == 1 ? lo[0] : lo[i];
    double h = hi.size() == 1 ? hi[0] : hi[i];
    out[i] = std::clamp(y[i], l, h);
  }
  return out;
}

}  // namespace

std::vector<double> project(const std::vector<double>& y, const ConstraintSet& set) {
  if (!all_finite(y)) throw InputError("projection input has non-finite entry");
  switch (set.kind) {
    case ConstraintSet::Kind::unconstrained:
      return y;
    case ConstraintSet::Kind::l2_ball:
      return project_l2(y, set.radius);
    case ConstraintSet::Kind::l1_ball:
      return project_l1(y, set.radius);
    case ConstraintSet::Kind::elastic_net_ball:
      return project_elastic(y, set.a1, set.a2, set.radius);
    case ConstraintSet::Kind::interval_box:
      if (set.lo.size() != 1 && set.lo.size() != y.size()) {
        throw ConfigError("box bound dimension mismatch");
      }
      return project_box(y, set.lo, set.hi);
  }
  throw ConfigError("unknown constraint kind");
}

double constraint_excess(const std::vector<double>& theta, const ConstraintSet& set) {
  switch (set.kind) {
    case ConstraintSet::Kind::unconstrained:
      return 0.0;
    case ConstraintSet::Kind::l2_ball:
      return norm2(theta) - set.radius;
    case ConstraintSet::Kind::l1_ball:
      return norm1(theta) - set.radius;
    case ConstraintSet::Kind::elastic_net_ball:
      return elastic_value(theta, set.a1, set.a2) - set.radius;
    case ConstraintSet::Kind::interval_box: {
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < theta.size(); ++i) {
        double l = set.lo.size() == 1 ? set.lo[0] : set.lo[i];
        double h = set.hi.size() == 1 ? set.hi[0] : set.hi[i];
        worst = std::max({worst, l - theta[i], theta[i] - h});
      }
      return worst;
    }
  }
  return 0.0;
}

ConstraintSet parse_constraint(const std::string& text) {
  if (text.empty() || text == "none") return ConstraintSet::unconstrained();
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("bad constraint: " + text);
  std::string kind = text.substr(0, colon);
  std::string args = text.substr(colon + 1);
  std::vector<double> nums;
  std::stringstream ss(args);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      nums.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad constraint number '" + tok + "' in: " + text);
    }
  }
  if (kind == "l2" && nums.size() == 1) return ConstraintSet::l2_ball(nums[0]);
  if (kind == "l1" && nums.size() == 1) return ConstraintSet::l1_ball(nums[0]);
  if (kind == "en" && nums.size() == 3) return ConstraintSet::elastic_net(nums[0], nums[1], nums[2]);
  if (kind == "box" && nums.size() == 2) return ConstraintSet::box({nums[0]}, {nums[1]});
  throw ConfigError("bad constraint: " + text);
}

}  // namespace dro
