#include "survpls/cv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "survpls/errors.hpp"
#include "survpls/metrics.hpp"

namespace survpls {

namespace {

constexpr double kWorstScore = 1e6;

bool is_sparse_method(Method m) {
  return m == Method::SPlsdr || m == Method::DkSPlsdr || m == Method::AutoPlsCox;
}

bool is_kernel_method(Method m) {
  return m == Method::DkPlsdr || m == Method::DkSPlsdr;
}

}  // namespace

FoldPlan make_balanced_folds(const SurvivalDataset& data, int k, Rng& rng) {
  data.validate();
  const int n = static_cast<int>(data.n());
  if (k < 2) throw InvalidInputError("make_balanced_folds: need at least 2 folds");
  if (k > n) throw InvalidInputError("make_balanced_folds: more folds than observations");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (data.status[a] != data.status[b]) return data.status[a] < data.status[b];
    if (data.times[a] != data.times[b]) return data.times[a] < data.times[b];
    return a < b;
  });

  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(static_cast<std::size_t>(n), -1);

  std::vector<int> folds(static_cast<std::size_t>(k));
  std::iota(folds.begin(), folds.end(), 0);
  const int full_bins = n / k;
  for (int b = 0; b < full_bins; ++b) {
    rng.shuffle(folds);
    for (int j = 0; j < k; ++j) {
      plan.assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(b * k + j)])] =
          folds[static_cast<std::size_t>(j)];
    }
  }
  const int leftover = n % k;
  if (leftover > 0) {
    rng.shuffle(folds);
    for (int j = 0; j < leftover; ++j) {
      plan.assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(full_bins * k + j)])] =
          folds[static_cast<std::size_t>(j)];
    }
  }
  return plan;
}

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Cvll: return "CVLL";
    case Criterion::VhCvll: return "vHCVLL";
    case Criterion::IaucCD: return "iAUCCD";
    case Criterion::IaucSH: return "iAUCSH";
    case Criterion::IaucUno: return "iAUCUno";
    case Criterion::IaucSurvROC: return "iAUCsurvROC";
    case Criterion::IBSw: return "iBSw";
    case Criterion::IBSunw: return "iBSunw";
    case Criterion::ISSw: return "iSSw";
    case Criterion::ISSunw: return "iSSunw";
  }
  return "?";
}

Criterion criterion_from_name(const std::string& name) {
  for (Criterion c : {Criterion::Cvll, Criterion::VhCvll, Criterion::IaucCD, Criterion::IaucSH,
                      Criterion::IaucUno, Criterion::IaucSurvROC, Criterion::IBSw,
                      Criterion::IBSunw, Criterion::ISSw, Criterion::ISSunw}) {
    if (criterion_name(c) == name) return c;
  }
  throw InvalidInputError("unknown criterion: " + name);
}

bool criterion_maximizes(Criterion c) {
  switch (c) {
    case Criterion::IBSw:
    case Criterion::IBSunw:
    case Criterion::ISSw:
    case Criterion::ISSunw:
      return false;
    default:
      return true;
  }
}

std::vector<GridPoint> default_grid(Method method, int max_m,
                                    const std::vector<double>& eta_grid) {
  std::vector<GridPoint> grid;
  grid.push_back(GridPoint{0, std::nullopt});
  if (method == Method::AutoPlsCox) {
    // m is chosen by the stopping rule; tune the significance level
    for (double eta : eta_grid) {
      if (eta > 0.0) grid.push_back(GridPoint{max_m, eta});
    }
    return grid;
  }
  for (int m = 1; m <= max_m; ++m) {
    if (is_sparse_method(method)) {
      for (double eta : eta_grid) grid.push_back(GridPoint{m, eta});
    } else {
      grid.push_back(GridPoint{m, std::nullopt});
    }
  }
  return grid;
}

Eigen::VectorXd CellFit::lp(const Eigen::MatrixXd& x) const {
  if (null_model || degenerate) return Eigen::VectorXd::Zero(x.rows());
  return model.predict_lp(x);
}

Eigen::MatrixXd CellFit::survival(const Eigen::MatrixXd& x,
                                  const std::vector<double>& times) const {
  if (null_model || degenerate) {
    Eigen::MatrixXd s(x.rows(), static_cast<Eigen::Index>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double v = std::exp(-null_cox.baseline_cumhaz(times[k]));
      s.col(static_cast<Eigen::Index>(k)).setConstant(v);
    }
    return s;
  }
  return model.predict_survival(x, times);
}

CellFit fit_grid_point(const SurvivalDataset& train, const ModelSpec& spec,
                       const GridPoint& point) {
  CellFit out;
  const auto fit_null_baseline = [&]() {
    SurvivalDataset bare;
    bare.times = train.times;
    bare.status = train.status;
    bare.covariates.resize(train.n(), 0);
    out.null_cox = fit_cox(bare, Eigen::VectorXd());
  };

  if (point.m == 0) {
    out.null_model = true;
    fit_null_baseline();
    return out;
  }
  try {
    switch (spec.method) {
      case Method::PlsCox:
        out.model = fit_plscox(train, point.m);
        break;
      case Method::AutoPlsCox:
        out.model = fit_plscox(train, point.m, point.eta, /*auto_stop=*/true);
        break;
      case Method::CoxPls:
        out.model = fit_coxpls(train, point.m);
        break;
      case Method::Plsdr:
        out.model = fit_plsdr(train, point.m);
        break;
      case Method::SPlsdr:
        out.model = fit_plsdr(train, point.m, point.eta);
        break;
      case Method::DkPlsdr:
        out.model = fit_plsdr(train, point.m, std::nullopt, spec.kernel);
        break;
      case Method::DkSPlsdr:
        out.model = fit_plsdr(train, point.m, point.eta, spec.kernel);
        break;
    }
    if (out.model.cox.monotone_likelihood) {
      out.degenerate = true;
      out.flag = "monotone_likelihood";
      fit_null_baseline();
    } else if (out.model.n_components == 0) {
      // an auto fit that stopped immediately is the null model
      out.null_model = true;
      fit_null_baseline();
    }
  } catch (const Error& e) {
    out.degenerate = true;
    out.flag = e.what();
    fit_null_baseline();
  }
  return out;
}

namespace {

// sparse methods need an eta whenever m > 0
void check_grid(const ModelSpec& spec, const std::vector<GridPoint>& grid) {
  if (grid.empty()) throw InvalidInputError("cross_validate: empty grid");
  for (const GridPoint& g : grid) {
    if (g.m < 0) throw InvalidInputError("cross_validate: negative m");
    if (g.m > 0 && is_sparse_method(spec.method) && !g.eta.has_value()) {
      throw InvalidInputError("cross_validate: sparse method needs an eta grid");
    }
    if (g.m > 0 && g.eta.has_value() && !is_sparse_method(spec.method)) {
      throw InvalidInputError("cross_validate: eta grid given for a non-sparse method");
    }
  }
}

double score_fold(Criterion criterion, const CellFit& fit,
                  const SurvivalDataset& fold_train, const SurvivalDataset& fold_test) {
  const Eigen::VectorXd lp = fit.lp(fold_test.covariates);
  switch (criterion) {
    case Criterion::IaucCD:
    case Criterion::IaucSH:
    case Criterion::IaucUno:
    case Criterion::IaucSurvROC: {
      const IaucEstimator est = criterion == Criterion::IaucCD      ? IaucEstimator::CD
                                : criterion == Criterion::IaucSH    ? IaucEstimator::SH
                                : criterion == Criterion::IaucUno   ? IaucEstimator::Uno
                                                                    : IaucEstimator::SurvROC;
      return iauc(est, lp, &fold_train, fold_test, default_auc_grid(fold_test)).integrated;
    }
    case Criterion::IBSw:
    case Criterion::IBSunw:
    case Criterion::ISSw:
    case Criterion::ISSunw: {
      const CurveKind kind = (criterion == Criterion::IBSw || criterion == Criterion::IBSunw)
                                 ? CurveKind::Brier
                                 : CurveKind::Schmid;
      const bool weighted = criterion == Criterion::IBSw || criterion == Criterion::ISSw;
      const SurvivalProvider provider = [&](const std::vector<double>& times) {
        return fit.survival(fold_test.covariates, times);
      };
      return prediction_error_curve(provider, fold_test, kind, weighted).integrated;
    }
    default:
      throw InvalidInputError("score_fold: not a fold-scored criterion");
  }
}

}  // namespace

CvResult cross_validate(const SurvivalDataset& data, const ModelSpec& spec,
                        const std::vector<GridPoint>& grid, Criterion criterion,
                        const FoldPlan& folds) {
  data.validate();
  check_grid(spec, grid);
  if (folds.k < 2 || static_cast<Eigen::Index>(folds.assignment.size()) != data.n()) {
    throw InvalidInputError("cross_validate: bad fold plan");
  }
  const int k = folds.k;
  const bool likelihood = criterion == Criterion::Cvll || criterion == Criterion::VhCvll;

  CvResult out;
  out.criterion = criterion;
  out.grid = grid;
  out.maximize = criterion_maximizes(criterion);
  out.fold_values.resize(static_cast<Eigen::Index>(grid.size()), k);
  out.degenerate_folds.assign(grid.size(), 0);

  std::vector<std::vector<int>> fold_rows(static_cast<std::size_t>(k));
  std::vector<std::vector<int>> train_rows(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < folds.assignment.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      (folds.assignment[i] == f ? fold_rows : train_rows)[static_cast<std::size_t>(f)]
          .push_back(static_cast<int>(i));
    }
  }

  for (std::size_t gidx = 0; gidx < grid.size(); ++gidx) {
    for (int f = 0; f < k; ++f) {
      const SurvivalDataset train = data.subset(train_rows[static_cast<std::size_t>(f)]);
      const SurvivalDataset held = data.subset(fold_rows[static_cast<std::size_t>(f)]);
      double value;
      CellFit fit;
      try {
        fit = fit_grid_point(train, spec, grid[gidx]);
      } catch (const Error&) {
        fit.degenerate = true;
      }
      if (fit.degenerate) {
        ++out.degenerate_folds[gidx];
        value = out.maximize ? -kWorstScore : kWorstScore;
      } else if (likelihood) {
        const Eigen::VectorXd lp_all = fit.lp(data.covariates);
        if (criterion == Criterion::Cvll) {
          if (held.n_events() == 0) {
            value = 0.0;  // fold without events contributes nothing, flagged upstream
          } else {
            Eigen::VectorXd lp_held(held.n());
            for (Eigen::Index r = 0; r < held.n(); ++r) {
              lp_held[r] = lp_all[fold_rows[static_cast<std::size_t>(f)][static_cast<std::size_t>(r)]];
            }
            value = cox_loglik_at_lp(held.times, held.status, lp_held);
          }
        } else {
          Eigen::VectorXd lp_train(train.n());
          for (Eigen::Index r = 0; r < train.n(); ++r) {
            lp_train[r] = lp_all[train_rows[static_cast<std::size_t>(f)][static_cast<std::size_t>(r)]];
          }
          value = cox_loglik_at_lp(data.times, data.status, lp_all) -
                  cox_loglik_at_lp(train.times, train.status, lp_train);
        }
      } else {
        try {
          value = score_fold(criterion, fit, train, held);
        } catch (const Error&) {
          ++out.degenerate_folds[gidx];
          value = out.maximize ? -kWorstScore : kWorstScore;
        }
      }
      out.fold_values(static_cast<Eigen::Index>(gidx), f) = value;
    }
  }

  out.summary = out.fold_values.rowwise().mean();

  // selection order: by (m, eta) so ties break toward parsimony and the
  // outcome cannot depend on grid ordering
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (grid[a].m != grid[b].m) return grid[a].m < grid[b].m;
    const double ea = grid[a].eta.value_or(-1.0);
    const double eb = grid[b].eta.value_or(-1.0);
    return ea < eb;
  });
  int best = -1;
  for (std::size_t idx : order) {
    if (out.degenerate_folds[idx] >= k) continue;  // nothing honest measured
    if (best < 0) {
      best = static_cast<int>(idx);
      continue;
    }
    const double cur = out.summary[static_cast<Eigen::Index>(idx)];
    const double ref = out.summary[best];
    if (out.maximize ? cur > ref : cur < ref) best = static_cast<int>(idx);
  }
  out.selected_index = best;
  return out;
}

GridPoint select_hyperparameters(const CvResult& cv) {
  if (cv.selected_index < 0) {
    throw UndefinedResultError("select_hyperparameters: every grid point degenerate");
  }
  return cv.grid[static_cast<std::size_t>(cv.selected_index)];
}

}  // namespace survpls
