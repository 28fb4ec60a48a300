#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "survpls/cox.hpp"
#include "survpls/data.hpp"
#include "survpls/step_function.hpp"

namespace survpls {

// ---------------------------------------------------------------------------
// Prediction error curves (Brier / Schmid)
// ---------------------------------------------------------------------------

enum class CurveKind { Brier, Schmid };

/// Supplies S(t | x_i) for the evaluation rows at the requested times;
/// returns a matrix with rows = observations, cols = times.
using SurvivalProvider =
    std::function<Eigen::MatrixXd(const std::vector<double>& times)>;

struct PredictionErrorCurve {
  CurveKind kind = CurveKind::Brier;
  bool weighted = true;
  StepFunction curve;        // tabulated at 0 and the unique observed times
  double integrated = 0.0;   // trapezoid over [0, max t], divided by max t
  bool weight_capped = false;  // some 1/G weight hit the floor
};

/// Censoring weights come from the Kaplan-Meier estimate of the censoring
/// distribution on the evaluation data itself, floored at 0.05. Unweighted
/// variants drop the 1/G factors.
PredictionErrorCurve prediction_error_curve(const SurvivalProvider& surv,
                                            const SurvivalDataset& test, CurveKind kind,
                                            bool weighted);

/// Integrated pointwise 1 - curve/null over [0, max t]. Grid points where
/// the null curve is zero are skipped (and shrink the covered length).
struct IntegratedRatio {
  double value = 0.0;
  bool skipped_points = false;
};
IntegratedRatio r2_prediction_error(const PredictionErrorCurve& model,
                                    const PredictionErrorCurve& null_curve);

// ---------------------------------------------------------------------------
// Likelihood-based R2 measures
// ---------------------------------------------------------------------------

/// 1 - exp(-(2/n)(l(beta) - l(0)))
double r2_nagelkerke(const CoxFit& fit);
/// 1 - exp(-(2/e)(l(beta) - l(0))); errors when the fit saw no events.
double r2_oxs(const CoxFit& fit);
/// 1 - J(beta)/J(0) with J the sum of squared Schoenfeld residuals.
double r2_xo(const ResidualSet& at_fit, const ResidualSet& at_null);

// ---------------------------------------------------------------------------
// Cross-validated partial log-likelihood
// ---------------------------------------------------------------------------

enum class CvScheme {
  Naive,           // sum of held-out-fold partial log-likelihoods
  VanHouwelingen,  // sum over folds of l_full - l_without_fold
};

/// Fits are delegated to lp_provider, which receives the training row
/// indices and must return a linear predictor for every row of `full`.
struct CvLoglik {
  double value = 0.0;
  bool empty_fold = false;  // some fold had no events (its naive term is 0)
};
CvLoglik cv_partial_loglik(
    const SurvivalDataset& full, const std::vector<int>& fold_assignment,
    const std::function<Eigen::VectorXd(const std::vector<int>&)>& lp_provider,
    CvScheme scheme);

// ---------------------------------------------------------------------------
// Time-dependent AUC
// ---------------------------------------------------------------------------

enum class IaucEstimator { CD, SH, Uno, SurvROC };

struct IaucResult {
  IaucEstimator estimator = IaucEstimator::SurvROC;
  std::vector<double> grid;
  std::vector<double> auc;
  double integrated = 0.5;
  bool degenerate_lp = false;  // constant linear predictor; 0.5 by convention
};

struct IaucOptions {
  double span = 0.0;        // SurvROC neighborhood fraction; <= 0 picks 0.25 n^-0.2
  double weight_floor = 0.05;  // floor on Kaplan-Meier censoring weights
};

/// Cumulative/dynamic AUC(t) over the grid plus its integrated summary.
/// `train` supplies the censoring distribution for Uno's estimator; the
/// Chambless-Diao estimator refits a one-covariate Cox model on (test, lp).
/// Integration weights: Chambless-Diao uses the Kaplan-Meier event-density
/// increments, the other estimators integrate uniformly over the grid.
IaucResult iauc(IaucEstimator estimator, const Eigen::VectorXd& lp,
                const SurvivalDataset* train, const SurvivalDataset& test,
                const std::vector<double>& grid, const IaucOptions& options = {});

/// Grid builder used by the CV engine and the study harness: the unique
/// event times strictly inside (0, max observed time).
std::vector<double> default_auc_grid(const SurvivalDataset& data);

// ---------------------------------------------------------------------------
// Concordance
// ---------------------------------------------------------------------------

enum class ConcordanceKind { Harrell, GonenHeller, Uno };

struct ConcordanceResult {
  double value = 0.0;
  bool degenerate_ties = false;  // every pair indicator was zero
};

/// Harrell's pairwise c, the Gonen-Heller concordance K_n evaluated on the
/// pairwise lp differences, or Uno's IPCW-weighted c (weights 1/G(t)^2 with
/// G from `train`).
ConcordanceResult concordance(const Eigen::VectorXd& lp, const SurvivalDataset& test,
                              ConcordanceKind kind,
                              const SurvivalDataset* train = nullptr,
                              double weight_floor = 0.05);

}  // namespace survpls
