#pragma once

#include <Eigen/Core>

#include "survpls/data.hpp"
#include "survpls/step_function.hpp"

namespace survpls {

/// Log partial likelihood, score and observed information at a fixed
/// coefficient vector (Breslow handling of ties).
struct CoxEval {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd information;
};

CoxEval cox_eval(const SurvivalDataset& data, const Eigen::VectorXd& beta);

/// Log partial likelihood of a fixed linear predictor (offset form, no
/// covariates). Used by cross-validated likelihood criteria.
double cox_loglik_at_lp(const Eigen::VectorXd& times, const Eigen::VectorXi& status,
                        const Eigen::VectorXd& lp);

/// Breslow estimator of the cumulative baseline hazard at a fixed linear
/// predictor. Steps at the distinct event times.
StepFunction breslow_baseline(const Eigen::VectorXd& times, const Eigen::VectorXi& status,
                              const Eigen::VectorXd& lp);

struct CoxOptions {
  int max_iter = 50;
  double tol_loglik = 1e-9;   // stop when |delta loglik| <= this ...
  double tol_score = 1e-6;    // ... and the max-abs score is below this
  int max_halvings = 10;      // step halvings per Newton iteration
  double beta_bound = 50.0;   // |beta| beyond this flags monotone likelihood
};

struct CoxFit {
  Eigen::VectorXd beta;
  double loglik = 0.0;
  double loglik_null = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd information;
  StepFunction baseline_cumhaz;
  bool converged = false;
  int iterations = 0;
  bool monotone_likelihood = false;
  Eigen::Index n_obs = 0;
  Eigen::Index n_events = 0;
};

/// Newton-Raphson maximization of the Breslow partial likelihood with step
/// halving. Covariates must be complete (no NaN) and at least one event is
/// required. A coefficient drifting past beta_bound flags (not throws)
/// monotone likelihood so cross-validation loops survive degenerate folds;
/// MonotoneLikelihoodError is thrown only when the likelihood itself turns
/// non-finite and halving cannot recover it.
CoxFit fit_cox(const SurvivalDataset& data, const Eigen::VectorXd& init,
               const CoxOptions& options = {});

/// Spec-shaped convenience overload.
CoxFit fit_cox(const SurvivalDataset& data, const Eigen::VectorXd& init, int max_iter,
               double tol);

struct ResidualSet {
  Eigen::VectorXd martingale;
  Eigen::VectorXd deviance;
  Eigen::MatrixXd schoenfeld;       // one row per event, ordered by event time
  Eigen::VectorXd schoenfeld_times; // event time of each row
};

/// Martingale, deviance and Schoenfeld residuals of a fit on its own data.
ResidualSet residuals(const CoxFit& fit, const SurvivalDataset& data);

/// Deviance residuals of the covariate-free Cox model; the working outcome
/// of the deviance-residual reductions.
Eigen::VectorXd null_deviance_residuals(const SurvivalDataset& data);

}  // namespace survpls
