#pragma once

#include <vector>

namespace survpls {

/// Right-continuous step function carried by sorted knots. Evaluation below
/// the first knot returns the declared left value; evaluation past the last
/// knot returns the last value.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> knots, std::vector<double> values, double left_value);

  /// Right-continuous evaluation: value at the largest knot <= t.
  double operator()(double t) const;

  /// Left limit: value just before t, i.e. at the largest knot < t.
  double left_limit(double t) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  double left_value() const { return left_value_; }
  bool empty() const { return knots_.empty(); }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  double left_value_ = 0.0;
};

/// Trapezoid integral of f over [a, b], treating f as the piecewise-linear
/// interpolant of its values at the knots restricted to [a, b].
double trapezoid_integral(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace survpls
