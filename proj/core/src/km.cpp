#include "survpls/km.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "survpls/errors.hpp"

namespace survpls {

StepFunction km_estimator(const SurvivalDataset& data, KmOrientation orientation) {
  const Eigen::Index n = data.n();
  if (n == 0) throw InvalidInputError("km_estimator: empty dataset");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return data.times[a] < data.times[b]; });

  std::vector<double> knots;
  std::vector<double> values;
  double surv = 1.0;
  Eigen::Index at_risk = n;
  std::size_t k = 0;
  while (k < order.size()) {
    const double t = data.times[order[k]];
    int events = 0;
    Eigen::Index leaving = 0;
    while (k < order.size() && data.times[order[k]] == t) {
      const int d = data.status[order[k]];
      const int flipped = orientation == KmOrientation::Event ? d : 1 - d;
      events += flipped;
      ++leaving;
      ++k;
    }
    if (events > 0) {
      surv *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      knots.push_back(t);
      values.push_back(surv);
    }
    at_risk -= leaving;
  }
  return StepFunction(std::move(knots), std::move(values), 1.0);
}

}  // namespace survpls
