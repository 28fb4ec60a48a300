#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "survpls/data.hpp"
#include "survpls/kernel.hpp"
#include "survpls/models.hpp"
#include "survpls/rng.hpp"

namespace survpls {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // fold index per observation
  std::uint64_t seed = 0;
};

/// Breiman-style balanced folds: order by (status, time), cut into bins of K
/// consecutive observations, draw one bin member per fold without
/// replacement; the leftover bin is spread over random distinct folds.
FoldPlan make_balanced_folds(const SurvivalDataset& data, int k, Rng& rng);

enum class Criterion {
  Cvll,
  VhCvll,
  IaucCD,
  IaucSH,
  IaucUno,
  IaucSurvROC,
  IBSw,
  IBSunw,
  ISSw,
  ISSunw,
};

std::string criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);
bool criterion_maximizes(Criterion c);

/// One candidate hyperparameter setting. m = 0 is the null model (lp = 0);
/// eta is the sparsity threshold for the sparse reductions or, for the
/// PLS-Cox family, the Wald significance level.
struct GridPoint {
  int m = 0;
  std::optional<double> eta;
};

/// Method plus the non-tuned settings it needs.
struct ModelSpec {
  Method method = Method::Plsdr;
  KernelSpec kernel = KernelSpec::gaussian(0.0);  // DK variants only
};

/// The method's default hyperparameter grid: m in {0..max_m}, crossed with
/// the eta grid for sparse methods.
std::vector<GridPoint> default_grid(Method method, int max_m,
                                    const std::vector<double>& eta_grid);

struct CvResult {
  Criterion criterion = Criterion::VhCvll;
  std::vector<GridPoint> grid;
  Eigen::MatrixXd fold_values;        // grid x folds
  Eigen::VectorXd summary;            // mean over folds
  std::vector<int> degenerate_folds;  // per grid point
  bool maximize = true;
  int selected_index = -1;
};

/// K-fold cross-validation of one (method, criterion) pair over the grid.
/// Degenerate fits score as the worst possible value and are flagged.
/// Selection happens in (m, eta) order so it does not depend on the grid
/// ordering; ties break toward smaller m, then smaller eta.
CvResult cross_validate(const SurvivalDataset& data, const ModelSpec& spec,
                        const std::vector<GridPoint>& grid, Criterion criterion,
                        const FoldPlan& folds);

/// The optimum of cv.summary in cv's direction. Throws when every grid
/// point was degenerate on every fold.
GridPoint select_hyperparameters(const CvResult& cv);

/// Shared fitting entry used by the CV engine and the study harness.
/// m = 0 yields the null model: zero linear predictor, baseline survival
/// from the covariate-free Cox fit.
struct CellFit {
  bool null_model = false;
  bool degenerate = false;
  std::string flag;
  FittedSurvivalModel model;
  CoxFit null_cox;

  Eigen::VectorXd lp(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd survival(const Eigen::MatrixXd& x, const std::vector<double>& times) const;
  int fitted_components() const { return null_model ? 0 : model.n_components; }
};

CellFit fit_grid_point(const SurvivalDataset& train, const ModelSpec& spec,
                       const GridPoint& point);

}  // namespace survpls
