#include "survpls/step_function.hpp"

#include <algorithm>

#include "survpls/errors.hpp"

namespace survpls {

StepFunction::StepFunction(std::vector<double> knots, std::vector<double> values,
                           double left_value)
    : knots_(std::move(knots)), values_(std::move(values)), left_value_(left_value) {
  if (knots_.size() != values_.size()) {
    throw InvalidInputError("step function: knot/value length mismatch");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw InvalidInputError("step function: knots must be strictly increasing");
    }
  }
}

double StepFunction::operator()(double t) const {
  // index of first knot > t; the function value is held on [knot[i-1], knot[i])
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return left_value_;
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return left_value_;
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double trapezoid_integral(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw InvalidInputError("trapezoid: grid/value length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  }
  return acc;
}

}  // namespace survpls
