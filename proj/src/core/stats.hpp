#pragma once

#include <cstdint>
#include <span>

namespace dro {

double sample_mean(std::span<const double> xs);

// ddof = 0 gives the 1/n moment, ddof = 1 the unbiased 1/(n-1) estimate.
double sample_variance(std::span<const double> xs, int ddof);

struct PairedTTest {
  double t = 0.0;
  double p_one_sided = 1.0;  // P(T >= t) under H0: mean(a - b) = 0
  std::int64_t n = 0;
};

// One-sided paired t-test of H1: mean(a) > mean(b) on per-replication pairs.
PairedTTest paired_t_test_greater(std::span<const double> a,
                                  std::span<const double> b);

struct BinomialCI {
  double fraction = 0.0;
  double lo = 0.0;
  double hi = 1.0;
};

// 95% normal-approximation interval, clipped to [0, 1].
BinomialCI binomial_ci95(std::int64_t successes, std::int64_t trials);

}  // namespace dro
