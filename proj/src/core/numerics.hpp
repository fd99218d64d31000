#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace dro {

// Compensated (Neumaier) accumulator. Keeps long sums accurate to ~1 ulp
// without depending on the width of long double.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double sum(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

inline double mean(std::span<const double> xs) {
  return xs.empty() ? 0.0 : sum(xs) / static_cast<double>(xs.size());
}

inline double squared_norm(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x * x);
  return s.value();
}

inline double norm2(std::span<const double> xs) {
  return std::sqrt(squared_norm(xs));
}

inline double norm1(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(std::abs(x));
  return s.value();
}

inline bool all_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace dro
