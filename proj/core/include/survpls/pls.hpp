#pragma once

#include <Eigen/Core>
#include <vector>

namespace survpls {

/// Column centering/scaling state, computed over non-missing cells.
struct Preprocess {
  Eigen::VectorXd means;
  Eigen::VectorXd scales;

  /// Center and scale; NaN cells pass through.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  /// Undo apply.
  Eigen::MatrixXd invert(const Eigen::MatrixXd& xs) const;
};

/// Fit centering/scaling. Every column needs at least two non-missing values
/// and nonzero variance; offending columns are named in the error.
Preprocess preprocess_fit(const Eigen::MatrixXd& x);

/// The reduction machinery shared by every component-based model: the
/// preprocessing state plus per-component weight and loading vectors.
/// Component scores are computed in slope form over available cells, so new
/// rows with missing entries still get scores.
struct ComponentMap {
  Preprocess pre;
  Eigen::MatrixXd weights;   // p x m, unit-norm columns
  Eigen::MatrixXd loadings;  // p x m

  int n_components() const { return static_cast<int>(weights.cols()); }

  /// Scores for new raw rows: preprocess, then per component compute the
  /// slope-form score and deflate.
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x_raw) const;
};

struct PlsFit {
  ComponentMap map;
  Eigen::MatrixXd scores;       // n x m (training components T)
  Eigen::VectorXd y_loadings;   // m
  double y_mean = 0.0;
  std::vector<std::vector<int>> active_sets;  // nonzero-weight indices per component
  Eigen::VectorXd coefficients;  // implied regression vector, original scale
  double intercept = 0.0;
  int requested_components = 0;
  bool truncated = false;  // stopped early on a vanishing weight vector

  int n_components() const { return map.n_components(); }
  Eigen::VectorXd predict(const Eigen::MatrixXd& x_raw) const;
};

/// Univariate-response NIPALS partial least squares. X may contain NaN
/// cells; slopes are computed over the available data.
PlsFit fit_pls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int m);

/// Componentwise (|z_j| - lambda/2)+ . sign(z_j).
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& z, double lambda);

/// Sparse PLS: soft-threshold the current direction with lambda/2 =
/// eta * max|z|, grow the active set, refit plain PLS on the active columns
/// with the current component count, deflate the outcome, repeat. Requires
/// a complete X.
PlsFit fit_spls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int m, double eta);

}  // namespace survpls
