#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dro {

// Per-example loss values z_1..z_n with summary statistics. The variance is
// the 1/n-normalized sample variance s_n^2.
class LossVector {
 public:
  explicit LossVector(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double min() const { return min_; }
  double max() const { return max_; }
  double range() const { return max_ - min_; }

 private:
  std::vector<double> values_;
  double mean_;
  double variance_;
  double min_;
  double max_;
};

enum class FastPath {
  degenerate_uniform,   // s_n^2 = 0 or rho = 0: empirical distribution
  closed_form_interior, // nonnegativity slack, closed-form weights
  dual_bisection,       // bisection over the chi-square multiplier
  point_mass,           // mass on the argmax set is feasible
};

const char* to_string(FastPath path);

struct WorstCaseSolution {
  std::vector<double> weights;  // maximizing p*, sums to 1
  double value = 0.0;           // <p*, z>
  double lambda = 0.0;          // chi-square multiplier (>= 0)
  double eta = 0.0;             // simplex multiplier
  bool constraint_active = false;
  FastPath fast_path = FastPath::degenerate_uniform;
  double expansion_gap = 0.0;   // value - (mean + sqrt(2 rho s^2 / n)), <= 0
};

// Exact solution of  max { <p, z> : p in simplex, 0.5 * ||n p - 1||^2 <= rho }.
// O(n log n) for the sort plus O(log(1/tol) log n) bisection.
WorstCaseSolution worst_case_distribution(const LossVector& z, double rho,
                                          double tol = 1e-10);

// Same problem solved through the dual bisection only, skipping the
// closed-form shortcut; the two routes must agree and tests hold them to it.
WorstCaseSolution worst_case_distribution_dual_path(const LossVector& z,
                                                    double rho,
                                                    double tol = 1e-10);

// min_i sqrt(2 rho) (z_i - mean) / sqrt(n s^2); +inf when s^2 = 0.
double expansion_min_ratio(const LossVector& z, double rho);

// True iff the closed-form maximizer keeps all weights nonnegative
// (min ratio >= -1); true by convention for constant z.
bool expansion_condition_holds(const LossVector& z, double rho);

// mean + sqrt(2 rho s^2 / n). Equals the exact optimum when the expansion
// condition holds, otherwise a strict upper bound.
double variance_expansion_value(const LossVector& z, double rho);

// Shared validation: rho >= 0 and finite.
void validate_radius(double rho);

}  // namespace dro
