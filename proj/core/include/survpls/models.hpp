#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "survpls/cox.hpp"
#include "survpls/data.hpp"
#include "survpls/kernel.hpp"
#include "survpls/pls.hpp"

namespace survpls {

enum class Method {
  PlsCox,
  AutoPlsCox,
  CoxPls,
  Plsdr,
  SPlsdr,
  DkPlsdr,
  DkSPlsdr,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// A fitted component-based survival model: the reduction machinery plus the
/// final Cox fit on the retained components.
struct FittedSurvivalModel {
  Method method = Method::Plsdr;
  int n_components = 0;
  std::optional<double> eta;         // sparse threshold, or significance level
  std::optional<KernelSpec> kernel;  // resolved bandwidth for the DK variants
  Eigen::MatrixXd train_x;           // raw training rows; kernel variants only
  ComponentMap map;                  // component construction state
  CoxFit cox;                        // final Cox fit on the components
  Eigen::VectorXd training_lp;

  /// Linear predictor for new raw covariate rows.
  Eigen::VectorXd predict_lp(const Eigen::MatrixXd& x_new) const;

  /// S(t | x) = exp(-Lambda0(t) exp(lp)), rows = observations, cols =
  /// eval_times (which must be sorted and nonnegative).
  Eigen::MatrixXd predict_survival(const Eigen::MatrixXd& x_new,
                                   const std::vector<double>& eval_times) const;
};

/// PLS-Cox / autoPLS-Cox: components built from coefficient weights of Cox
/// regressions adjusted for the previous components. With sparse_eta, a
/// weight is zeroed when its Wald p-value exceeds the level; in auto mode
/// components are added until every weight is zeroed (m acts as a cap).
FittedSurvivalModel fit_plscox(const SurvivalDataset& data, int m,
                               std::optional<double> sparse_eta = std::nullopt,
                               bool auto_stop = false);

/// PLS of the covariates on the raw observation time, then Cox on the
/// components (the reduction ignores censoring on purpose).
FittedSurvivalModel fit_coxpls(const SurvivalDataset& data, int m);

/// Deviance-residual reductions: plain (PLSDR), sparse (sPLSDR), direct
/// kernel (DKPLSDR) and sparse direct kernel (DKsPLSDR), selected by which
/// optionals are present.
FittedSurvivalModel fit_plsdr(const SurvivalDataset& data, int m,
                              std::optional<double> eta = std::nullopt,
                              std::optional<KernelSpec> kernel = std::nullopt);

/// Self-describing JSON document with everything predict needs.
std::string serialize_model(const FittedSurvivalModel& model);
FittedSurvivalModel deserialize_model(const std::string& text);

}  // namespace survpls
