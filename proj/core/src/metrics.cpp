#include "survpls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "survpls/errors.hpp"
#include "survpls/km.hpp"

namespace survpls {

PredictionErrorCurve prediction_error_curve(const SurvivalProvider& surv,
                                            const SurvivalDataset& test, CurveKind kind,
                                            bool weighted) {
  test.validate();
  const Eigen::Index n = test.n();
  const StepFunction g = km_estimator(test, KmOrientation::Censoring);
  const double floor = 0.05;

  std::set<double> time_set{0.0};
  for (Eigen::Index i = 0; i < n; ++i) time_set.insert(test.times[i]);
  const std::vector<double> grid(time_set.begin(), time_set.end());
  const double t_max = grid.back();

  const Eigen::MatrixXd s = surv(grid);
  if (s.rows() != n || s.cols() != static_cast<Eigen::Index>(grid.size())) {
    throw InvalidInputError("prediction_error_curve: provider shape mismatch");
  }

  PredictionErrorCurve out;
  out.kind = kind;
  out.weighted = weighted;

  // per-observation censoring weights at t_i and just before t_i
  Eigen::VectorXd w_at(n), w_before(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double g_at = g(test.times[i]);
    double g_before = g.left_limit(test.times[i]);
    if (weighted && (g_at < floor || g_before < floor)) out.weight_capped = true;
    g_at = std::max(g_at, floor);
    g_before = std::max(g_before, floor);
    w_at[i] = weighted ? 1.0 / g_at : 1.0;
    w_before[i] = weighted ? 1.0 / g_before : 1.0;
  }

  std::vector<double> values(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double si = s(i, static_cast<Eigen::Index>(k));
      const bool past_event = test.times[i] <= t && test.status[i] == 1;
      const bool still_in = test.times[i] > t;
      if (kind == CurveKind::Brier) {
        if (past_event) acc += si * si * w_at[i];
        if (still_in) acc += (1.0 - si) * (1.0 - si) * w_at[i];
      } else {
        const double dev = std::abs((still_in ? 1.0 : 0.0) - si);
        if (past_event) acc += dev * w_before[i];
        if (still_in) acc += dev * w_at[i];
      }
    }
    values[k] = acc / static_cast<double>(n);
  }

  out.integrated = t_max > 0.0 ? trapezoid_integral(grid, values) / t_max : 0.0;
  std::vector<double> knots = grid;
  double at_zero = values.front();
  if (knots.front() == 0.0) {
    knots.erase(knots.begin());
    values.erase(values.begin());
  } else {
    at_zero = 0.0;
  }
  out.curve = StepFunction(std::move(knots), std::move(values), at_zero);
  return out;
}

IntegratedRatio r2_prediction_error(const PredictionErrorCurve& model,
                                    const PredictionErrorCurve& null_curve) {
  if (model.kind != null_curve.kind || model.weighted != null_curve.weighted) {
    throw InvalidInputError("r2_prediction_error: curve kind/weighting mismatch");
  }
  if (model.curve.knots() != null_curve.curve.knots()) {
    throw InvalidInputError("r2_prediction_error: curves tabulated on different grids");
  }
  // t = 0 is a 0/0 point for both curves; the covered region starts at the
  // first knot where the null curve is positive.
  IntegratedRatio out;
  std::vector<double> xs;
  std::vector<double> ratio;
  const auto& knots = model.curve.knots();
  const auto& mv = model.curve.values();
  const auto& nv = null_curve.curve.values();
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (nv[k] == 0.0) {
      out.skipped_points = true;
      continue;
    }
    xs.push_back(knots[k]);
    ratio.push_back(1.0 - mv[k] / nv[k]);
  }
  if (xs.size() < 2) {
    out.value = xs.empty() ? 0.0 : ratio.front();
    return out;
  }
  const double length = xs.back() - xs.front();
  out.value = length > 0.0 ? trapezoid_integral(xs, ratio) / length : ratio.front();
  return out;
}

double r2_nagelkerke(const CoxFit& fit) {
  return 1.0 - std::exp(-(2.0 / static_cast<double>(fit.n_obs)) *
                        (fit.loglik - fit.loglik_null));
}

double r2_oxs(const CoxFit& fit) {
  if (fit.n_events == 0) throw InvalidInputError("r2_oxs: no events");
  return 1.0 - std::exp(-(2.0 / static_cast<double>(fit.n_events)) *
                        (fit.loglik - fit.loglik_null));
}

double r2_xo(const ResidualSet& at_fit, const ResidualSet& at_null) {
  const double j_fit = at_fit.schoenfeld.squaredNorm();
  const double j_null = at_null.schoenfeld.squaredNorm();
  if (j_null == 0.0) return 0.0;
  return 1.0 - j_fit / j_null;
}

CvLoglik cv_partial_loglik(
    const SurvivalDataset& full, const std::vector<int>& fold_assignment,
    const std::function<Eigen::VectorXd(const std::vector<int>&)>& lp_provider,
    CvScheme scheme) {
  full.validate();
  if (static_cast<Eigen::Index>(fold_assignment.size()) != full.n()) {
    throw InvalidInputError("cv_partial_loglik: assignment length mismatch");
  }
  int n_folds = 0;
  for (int f : fold_assignment) n_folds = std::max(n_folds, f + 1);
  if (n_folds < 2) throw InvalidInputError("cv_partial_loglik: need at least 2 folds");

  CvLoglik out;
  for (int f = 0; f < n_folds; ++f) {
    std::vector<int> test_rows, train_rows;
    for (std::size_t i = 0; i < fold_assignment.size(); ++i) {
      (fold_assignment[i] == f ? test_rows : train_rows).push_back(static_cast<int>(i));
    }
    const Eigen::VectorXd lp = lp_provider(train_rows);
    if (lp.size() != full.n()) {
      throw InvalidInputError("cv_partial_loglik: provider must return lp for all rows");
    }

    if (scheme == CvScheme::Naive) {
      Eigen::VectorXd t(static_cast<Eigen::Index>(test_rows.size()));
      Eigen::VectorXi s(static_cast<Eigen::Index>(test_rows.size()));
      Eigen::VectorXd l(static_cast<Eigen::Index>(test_rows.size()));
      int events = 0;
      for (std::size_t k = 0; k < test_rows.size(); ++k) {
        const Eigen::Index kk = static_cast<Eigen::Index>(k);
        t[kk] = full.times[test_rows[k]];
        s[kk] = full.status[test_rows[k]];
        l[kk] = lp[test_rows[k]];
        events += s[kk];
      }
      if (events == 0) {
        out.empty_fold = true;
        continue;
      }
      out.value += cox_loglik_at_lp(t, s, l);
    } else {
      Eigen::VectorXd t(static_cast<Eigen::Index>(train_rows.size()));
      Eigen::VectorXi s(static_cast<Eigen::Index>(train_rows.size()));
      Eigen::VectorXd l(static_cast<Eigen::Index>(train_rows.size()));
      for (std::size_t k = 0; k < train_rows.size(); ++k) {
        const Eigen::Index kk = static_cast<Eigen::Index>(k);
        t[kk] = full.times[train_rows[k]];
        s[kk] = full.status[train_rows[k]];
        l[kk] = lp[train_rows[k]];
      }
      out.value += cox_loglik_at_lp(full.times, full.status, lp) - cox_loglik_at_lp(t, s, l);
    }
  }
  return out;
}

}  // namespace survpls
