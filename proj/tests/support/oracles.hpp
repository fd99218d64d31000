// Independent reference solvers used only by tests. All of them attack
//   max { <p, z> : p in simplex, 0.5 ||n p - 1||^2 <= rho }
// through routes that share nothing with the production dual solver.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace oracles {

inline double chi2_of(const std::vector<double>& p) {
  double n = static_cast<double>(p.size());
  double acc = 0.0;
  for (double w : p) {
    double c = n * w - 1.0;
    acc += c * c;
  }
  return 0.5 * acc;
}

inline double value_of(const std::vector<double>& p, const std::vector<double>& z) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * z[i];
  return acc;
}

// ------------------------------------------------------------------
// Exhaustive face enumeration (exact). For every support S, the candidates
// are the uniform distribution over S (divergence-minimal on the face) and
// the face's sphere-slice maximizer when the divergence constraint is tight.
inline double enumerate_face_max(const std::vector<double>& z, double rho) {
  const std::size_t n = z.size();
  const double nd = static_cast<double>(n);
  double best = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) support.push_back(i);
    }
    const double kd = static_cast<double>(support.size());
    const double off = nd - kd;

    // Uniform over the support.
    if (nd * off / (2.0 * kd) <= rho + 1e-12) {
      double mean_s = 0.0;
      for (std::size_t i : support) mean_s += z[i] / kd;
      best = std::max(best, mean_s);
    }

    // Sphere-slice maximizer: q = off/k * 1 + t * (z_S - mean(z_S)).
    double r_sq = 2.0 * rho - off;
    if (r_sq < off * off / kd - 1e-15) continue;
    double mean_s = 0.0;
    for (std::size_t i : support) mean_s += z[i] / kd;
    double c_norm_sq = 0.0;
    for (std::size_t i : support) {
      double c = z[i] - mean_s;
      c_norm_sq += c * c;
    }
    if (c_norm_sq <= 0.0) continue;  // constant face: uniform candidate covers it
    double t = std::sqrt(std::max(0.0, r_sq - off * off / kd) / c_norm_sq);
    std::vector<double> p(n, 0.0);
    bool ok = true;
    for (std::size_t i : support) {
      double q = off / kd + t * (z[i] - mean_s);
      double w = (q + 1.0) / nd;
      if (w < -1e-10) {
        ok = false;
        break;
      }
      p[i] = std::max(0.0, w);
    }
    if (!ok) continue;
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& w : p) w /= total;
    if (chi2_of(p) <= rho * (1.0 + 1e-9) + 1e-12) {
      best = std::max(best, value_of(p, z));
    }
  }
  return best;
}

// ------------------------------------------------------------------
// Refined grid search over the simplex, n <= 3. Each grid point also
// contributes its radial pushout to the chi-square sphere (staying on the
// simplex plane), so boundary optima are located at grid resolution.
inline double grid_simplex_max(const std::vector<double>& z, double rho,
                               int rounds = 10, int points = 200) {
  const std::size_t n = z.size();
  const double nd = static_cast<double>(n);
  auto feasible_value = [&](const std::vector<double>& p, double& out) {
    double total = 0.0;
    for (double w : p) {
      if (w < 0.0) return false;
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) return false;
    if (chi2_of(p) > rho + 1e-12) return false;
    out = value_of(p, z);
    return true;
  };
  // Best feasible value among the point itself and its radial pushout to
  // the chi-square sphere; -inf when neither is feasible. The direction is
  // re-centered onto the zero-sum plane so rounding in 1-x-y cannot get
  // amplified out of the simplex.
  auto candidate_value = [&](const std::vector<double>& p) {
    double best = -std::numeric_limits<double>::infinity();
    double v;
    if (feasible_value(p, v)) best = v;
    std::vector<double> dir(p.size());
    double dir_mean = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      dir[i] = p[i] - 1.0 / nd;
      dir_mean += dir[i] / nd;
    }
    double dist_sq = 0.0;
    for (double& dcoord : dir) {
      dcoord -= dir_mean;
      dist_sq += dcoord * dcoord;
    }
    if (dist_sq > 1e-20) {
      double scale = std::sqrt(2.0 * rho) / nd / std::sqrt(dist_sq);
      std::vector<double> q(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        q[i] = 1.0 / nd + dir[i] * scale;
      }
      if (feasible_value(q, v) && v > best) best = v;
    }
    return best;
  };

  if (n == 1) return z[0];
  double best = -std::numeric_limits<double>::infinity();
  if (n == 2) {
    double lo = 0.0, hi = 1.0;
    double best_x = 0.5;
    for (int round = 0; round < rounds; ++round) {
      for (int i = 0; i <= points; ++i) {
        double x = lo + (hi - lo) * i / points;
        double v = candidate_value({x, 1.0 - x});
        if (v > best) {
          best = v;
          best_x = x;
        }
      }
      double width = (hi - lo) * 4.0 / points;
      lo = std::max(0.0, best_x - width);
      hi = std::min(1.0, best_x + width);
    }
    return best;
  }
  // n == 3
  double lo1 = 0.0, hi1 = 1.0, lo2 = 0.0, hi2 = 1.0;
  double bx = 1.0 / 3, by = 1.0 / 3;
  const int grid = 120;
  for (int round = 0; round < rounds; ++round) {
    for (int i = 0; i <= grid; ++i) {
      double x = lo1 + (hi1 - lo1) * i / grid;
      for (int j = 0; j <= grid; ++j) {
        double y = lo2 + (hi2 - lo2) * j / grid;
        if (x + y > 1.0) continue;
        double v = candidate_value({x, y, 1.0 - x - y});
        if (v > best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    }
    double w1 = (hi1 - lo1) * 4.0 / grid;
    double w2 = (hi2 - lo2) * 4.0 / grid;
    lo1 = std::max(0.0, bx - w1);
    hi1 = std::min(1.0, bx + w1);
    lo2 = std::max(0.0, by - w2);
    hi2 = std::min(1.0, by + w2);
  }
  return best;
}

// ------------------------------------------------------------------
// Long-run projected ascent with Dykstra's algorithm for the projection onto
// simplex intersect chi-square ball.
inline std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  int k = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      tau = t;
      k = static_cast<int>(i + 1);
    }
  }
  (void)k;
  for (double& x : v) x = std::max(0.0, x - tau);
  return v;
}

inline std::vector<double> project_chi2_ball(std::vector<double> v, double rho) {
  const double n = static_cast<double>(v.size());
  const double radius = std::sqrt(2.0 * rho) / n;
  double dist_sq = 0.0;
  for (double x : v) {
    double c = x - 1.0 / n;
    dist_sq += c * c;
  }
  double dist = std::sqrt(dist_sq);
  if (dist <= radius) return v;
  double scale = radius / dist;
  for (double& x : v) x = 1.0 / n + (x - 1.0 / n) * scale;
  return v;
}

inline std::vector<double> dykstra_project(std::vector<double> v, double rho,
                                           int iters = 400) {
  std::vector<double> p(v.size(), 0.0), q(v.size(), 0.0);
  std::vector<double> x = std::move(v);
  for (int it = 0; it < iters; ++it) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + p[i];
    std::vector<double> x1 = project_simplex(y);
    for (std::size_t i = 0; i < x.size(); ++i) p[i] = y[i] - x1[i];
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x1[i] + q[i];
    std::vector<double> x2 = project_chi2_ball(y, rho);
    for (std::size_t i = 0; i < x.size(); ++i) q[i] = y[i] - x2[i];
    x = std::move(x2);
  }
  return x;
}

inline double projected_ascent_max(const std::vector<double>& z, double rho,
                                   int iters = 4000) {
  const std::size_t n = z.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  double z_scale = 0.0;
  for (double v : z) z_scale = std::max(z_scale, std::abs(v));
  if (z_scale == 0.0) return 0.0;
  double step = 0.5 / (static_cast<double>(n) * z_scale);
  double best = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) p[i] += step * z[i];
    p = dykstra_project(std::move(p), rho, 60);
    best = std::max(best, value_of(p, z));
  }
  return best;
}

// ------------------------------------------------------------------
inline std::vector<double> central_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& theta, double h = 1e-6) {
  std::vector<double> g(theta.size(), 0.0);
  std::vector<double> probe = theta;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    probe[j] = theta[j] + h;
    double fp = f(probe);
    probe[j] = theta[j] - h;
    double fm = f(probe);
    probe[j] = theta[j];
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace oracles
