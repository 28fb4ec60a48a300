#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "survpls/errors.hpp"
#include "survpls/km.hpp"
#include "survpls/metrics.hpp"

namespace survpls {

namespace {

// 1 / 0.5 / 0 for lp_a > / = / < lp_b
inline double rank_indicator(double a, double b) {
  if (a > b) return 1.0;
  if (a == b) return 0.5;
  return 0.0;
}

bool constant_lp(const Eigen::VectorXd& lp) {
  for (Eigen::Index i = 1; i < lp.size(); ++i) {
    if (lp[i] != lp[0]) return false;
  }
  return true;
}

// IPCW pair-counting AUC(t). Case weight ~ 1/G(t_i-)^power for events with
// t_i <= t; controls are the rows with t_j > t.
double ipcw_auc(const SurvivalDataset& test, const Eigen::VectorXd& lp, double t,
                const StepFunction& g, int power, double floor) {
  const Eigen::Index n = test.n();
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (test.status[i] != 1 || test.times[i] > t) continue;
    const double gi = std::max(g.left_limit(test.times[i]), floor);
    const double wi = power == 2 ? 1.0 / (gi * gi) : 1.0 / gi;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (test.times[j] <= t) continue;
      num += wi * rank_indicator(lp[i], lp[j]);
      den += wi;
    }
  }
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

// Model-based AUC(t): fit a one-covariate Cox model of the evaluation data
// on lp, then compare survival-probability-weighted pairs.
class ModelBasedAuc {
 public:
  ModelBasedAuc(const SurvivalDataset& test, const Eigen::VectorXd& lp) : lp_(lp) {
    SurvivalDataset d;
    d.times = test.times;
    d.status = test.status;
    d.covariates = lp;
    fit_ = fit_cox(d, Eigen::VectorXd::Zero(1));
  }

  double operator()(double t) const {
    const Eigen::Index n = lp_.size();
    const double lam = fit_.baseline_cumhaz(t);
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      s[i] = std::exp(-lam * std::exp(fit_.beta[0] * lp_[i]));
    }
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double w = (1.0 - s[i]) * s[j];
        num += w * rank_indicator(lp_[i], lp_[j]);
        den += w;
      }
    }
    return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
  }

 private:
  const Eigen::VectorXd& lp_;
  CoxFit fit_;
};

// Nearest-neighbor smoothed bivariate survival: per-subject conditional
// Kaplan-Meier curves over lp-percentile neighborhoods.
class NearestNeighborAuc {
 public:
  NearestNeighborAuc(const SurvivalDataset& test, const Eigen::VectorXd& lp, double span)
      : test_(test), lp_(lp) {
    const Eigen::Index n = lp.size();
    // mid-rank percentiles
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return lp[a] < lp[b]; });
    perc_.resize(n);
    std::size_t k = 0;
    while (k < order.size()) {
      std::size_t g = k;
      while (g < order.size() && lp[order[g]] == lp[order[k]]) ++g;
      const double mid = 0.5 * static_cast<double>(k + g - 1) + 1.0;
      for (std::size_t j = k; j < g; ++j) perc_[order[j]] = mid / static_cast<double>(n);
      k = g;
    }
    // per-subject conditional survival curve over its neighborhood
    curves_.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<int> nb;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(perc_[j] - perc_[i]) <= span) nb.push_back(static_cast<int>(j));
      }
      curves_.push_back(km_estimator(test.subset(nb), KmOrientation::Event));
    }
  }

  double operator()(double t) const {
    const Eigen::Index n = lp_.size();
    Eigen::VectorXd s_cond(n);
    for (Eigen::Index i = 0; i < n; ++i) s_cond[i] = curves_[static_cast<std::size_t>(i)](t);
    const double s_marg = s_cond.mean();
    if (!(s_marg > 0.0) || !(s_marg < 1.0)) return std::numeric_limits<double>::quiet_NaN();

    // sweep thresholds over the distinct lp values from high to low
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return lp_[a] > lp_[b]; });

    double auc = 0.0;
    double tpr_prev = 0.0, fpr_prev = 0.0;
    double above = 0.0, above_s = 0.0;
    std::size_t k = 0;
    while (k < order.size()) {
      std::size_t g = k;
      while (g < order.size() && lp_[order[g]] == lp_[order[k]]) ++g;
      for (std::size_t j = k; j < g; ++j) {
        above += 1.0;
        above_s += s_cond[order[j]];
      }
      const double joint = above_s / static_cast<double>(n);  // P(lp > c, T > t)
      const double frac = above / static_cast<double>(n);     // P(lp > c)
      double tpr = (frac - joint) / (1.0 - s_marg);
      double fpr = joint / s_marg;
      tpr = std::clamp(tpr, 0.0, 1.0);
      fpr = std::clamp(fpr, 0.0, 1.0);
      auc += 0.5 * (tpr + tpr_prev) * (fpr - fpr_prev);
      tpr_prev = tpr;
      fpr_prev = fpr;
      k = g;
    }
    auc += 0.5 * (1.0 + tpr_prev) * (1.0 - fpr_prev);
    return auc;
  }

 private:
  const SurvivalDataset& test_;
  const Eigen::VectorXd& lp_;
  Eigen::VectorXd perc_;
  std::vector<StepFunction> curves_;
};

}  // namespace

IaucResult iauc(IaucEstimator estimator, const Eigen::VectorXd& lp,
                const SurvivalDataset* train, const SurvivalDataset& test,
                const std::vector<double>& grid, const IaucOptions& options) {
  test.validate();
  if (lp.size() != test.n()) throw InvalidInputError("iauc: lp length mismatch");
  if (!lp.allFinite()) throw InvalidInputError("iauc: lp must be finite");
  if (grid.empty()) throw InvalidInputError("iauc: empty grid");
  const double t_max = test.times.maxCoeff();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || !(grid[k] < t_max) || (k > 0 && grid[k] <= grid[k - 1])) {
      throw InvalidInputError("iauc: grid must be increasing inside (0, max time)");
    }
  }

  IaucResult out;
  out.estimator = estimator;
  out.grid = grid;
  out.auc.assign(grid.size(), 0.5);
  if (constant_lp(lp)) {
    out.degenerate_lp = true;
    out.integrated = 0.5;
    return out;
  }
  if ((estimator == IaucEstimator::Uno) && train == nullptr) {
    throw InvalidInputError("iauc: Uno's estimator needs the training data");
  }

  switch (estimator) {
    case IaucEstimator::Uno: {
      const StepFunction g = km_estimator(*train, KmOrientation::Censoring);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        out.auc[k] = ipcw_auc(test, lp, grid[k], g, 2, options.weight_floor);
      }
      break;
    }
    case IaucEstimator::SH: {
      const StepFunction g = km_estimator(test, KmOrientation::Censoring);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        out.auc[k] = ipcw_auc(test, lp, grid[k], g, 1, options.weight_floor);
      }
      break;
    }
    case IaucEstimator::CD: {
      const ModelBasedAuc mb(test, lp);
      for (std::size_t k = 0; k < grid.size(); ++k) out.auc[k] = mb(grid[k]);
      break;
    }
    case IaucEstimator::SurvROC: {
      const double span = options.span > 0.0
                              ? options.span
                              : 0.25 * std::pow(static_cast<double>(test.n()), -0.2);
      const NearestNeighborAuc nne(test, lp, span);
      for (std::size_t k = 0; k < grid.size(); ++k) out.auc[k] = nne(grid[k]);
      break;
    }
  }
  for (double& a : out.auc) {
    if (!std::isfinite(a)) a = 0.5;  // no usable cases or controls at that t
  }

  if (estimator == IaucEstimator::CD) {
    // weight by the Kaplan-Meier event-density increments
    const StepFunction s = km_estimator(test, KmOrientation::Event);
    double wsum = 0.0, acc = 0.0;
    double prev_t = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double w = s(prev_t) - s(grid[k]);
      acc += w * out.auc[k];
      wsum += w;
      prev_t = grid[k];
    }
    out.integrated = wsum > 0.0
                         ? acc / wsum
                         : std::accumulate(out.auc.begin(), out.auc.end(), 0.0) /
                               static_cast<double>(out.auc.size());
  } else if (grid.size() == 1) {
    out.integrated = out.auc.front();
  } else {
    out.integrated = trapezoid_integral(grid, out.auc) / (grid.back() - grid.front());
  }
  return out;
}

std::vector<double> default_auc_grid(const SurvivalDataset& data) {
  const double t_max = data.times.maxCoeff();
  std::set<double> times;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (data.status[i] == 1 && data.times[i] > 0.0 && data.times[i] < t_max) {
      times.insert(data.times[i]);
    }
  }
  if (!times.empty()) return {times.begin(), times.end()};
  // degenerate fallback: interior quantile points
  std::vector<double> grid;
  for (double q : {0.25, 0.5, 0.75}) grid.push_back(q * t_max);
  return grid;
}

}  // namespace survpls
