#include "core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace dro {

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw InputError("mean of empty sample");
  return mean(xs);
}

double sample_variance(std::span<const double> xs, int ddof) {
  auto n = static_cast<std::int64_t>(xs.size());
  if (n <= ddof) throw InputError("not enough observations for variance");
  double m = mean(xs);
  KahanSum acc;
  for (double x : xs) {
    double c = x - m;
    acc.add(c * c);
  }
  return acc.value() / static_cast<double>(n - ddof);
}

PairedTTest paired_t_test_greater(std::span<const double> a,
                                  std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("paired test needs equal lengths");
  if (a.size() < 2) throw InputError("paired test needs at least two pairs");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];

  PairedTTest out;
  out.n = static_cast<std::int64_t>(a.size());
  double m = mean(diff);
  double sd = std::sqrt(sample_variance(diff, 1));
  if (sd == 0.0) {
    out.t = m > 0.0 ? std::numeric_limits<double>::infinity()
                    : (m < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
    out.p_one_sided = m > 0.0 ? 0.0 : (m < 0.0 ? 1.0 : 0.5);
    return out;
  }
  out.t = m / (sd / std::sqrt(static_cast<double>(out.n)));
  boost::math::students_t dist(static_cast<double>(out.n - 1));
  out.p_one_sided = boost::math::cdf(boost::math::complement(dist, out.t));
  return out;
}

BinomialCI binomial_ci95(std::int64_t successes, std::int64_t trials) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw InputError("bad binomial counts");
  }
  BinomialCI out;
  auto n = static_cast<double>(trials);
  out.fraction = static_cast<double>(successes) / n;
  double half = 1.959963984540054 * std::sqrt(out.fraction * (1.0 - out.fraction) / n);
  out.lo = std::max(0.0, out.fraction - half);
  out.hi = std::min(1.0, out.fraction + half);
  return out;
}

}  // namespace dro
