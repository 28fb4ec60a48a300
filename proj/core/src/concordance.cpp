#include <cmath>

#include "survpls/errors.hpp"
#include "survpls/km.hpp"
#include "survpls/metrics.hpp"

namespace survpls {

ConcordanceResult concordance(const Eigen::VectorXd& lp, const SurvivalDataset& test,
                              ConcordanceKind kind, const SurvivalDataset* train,
                              double weight_floor) {
  test.validate();
  const Eigen::Index n = test.n();
  if (lp.size() != n) throw InvalidInputError("concordance: lp length mismatch");
  if (!lp.allFinite()) throw InvalidInputError("concordance: lp must be finite");
  if (n < 2) throw UndefinedResultError("concordance: need at least 2 observations");

  ConcordanceResult out;

  if (kind == ConcordanceKind::GonenHeller) {
    // K_n on the pairwise lp differences; zero-indicator pairs contribute 0.
    double acc = 0.0;
    bool any = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d_ji = lp[j] - lp[i];
        if (d_ji < 0.0) {
          acc += 1.0 / (1.0 + std::exp(d_ji));
          any = true;
        } else if (d_ji > 0.0) {
          acc += 1.0 / (1.0 + std::exp(-d_ji));
          any = true;
        }
      }
    }
    out.value = 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1)) * acc;
    out.degenerate_ties = !any;
    return out;
  }

  const bool uno = kind == ConcordanceKind::Uno;
  StepFunction g;
  if (uno) {
    if (train == nullptr) {
      throw InvalidInputError("concordance: Uno's estimator needs the training data");
    }
    g = km_estimator(*train, KmOrientation::Censoring);
  }

  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!(test.times[i] < test.times[j]) || test.status[i] != 1) continue;
      double w = 1.0;
      if (uno) {
        const double gi = std::max(g.left_limit(test.times[i]), weight_floor);
        w = 1.0 / (gi * gi);
      }
      den += w;
      if (lp[i] > lp[j]) num += w;
    }
  }
  if (den == 0.0) {
    throw UndefinedResultError("concordance: no usable pairs");
  }
  out.value = num / den;
  return out;
}

}  // namespace survpls
