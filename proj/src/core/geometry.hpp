#pragma once

#include <string>
#include <vector>

namespace dro {

// Feasible parameter region, defined by its exact Euclidean projection.
struct ConstraintSet {
  enum class Kind { unconstrained, l2_ball, l1_ball, elastic_net_ball, interval_box };

  Kind kind = Kind::unconstrained;
  double radius = 0.0;        // l2/l1/elastic-net bound r
  double a1 = 0.0, a2 = 0.0;  // elastic-net coefficients
  std::vector<double> lo, hi; // interval box (broadcast when size 1)

  static ConstraintSet unconstrained();
  static ConstraintSet l2_ball(double r);
  static ConstraintSet l1_ball(double r);
  static ConstraintSet elastic_net(double a1, double a2, double r);
  static ConstraintSet box(std::vector<double> lo, std::vector<double> hi);

  std::string describe() const;
};

// argmin_{theta in set} ||theta - y||_2.
std::vector<double> project(const std::vector<double>& y, const ConstraintSet& set);

// Constraint function value minus its bound; <= 0 means feasible
// (0 for unconstrained, max over coordinates for boxes).
double constraint_excess(const std::vector<double>& theta, const ConstraintSet& set);

// Grammar: "none" | "l2:R" | "l1:R" | "en:A1,A2,R" | "box:LO,HI".
ConstraintSet parse_constraint(const std::string& text);

}  // namespace dro
