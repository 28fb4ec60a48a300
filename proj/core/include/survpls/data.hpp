#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace survpls {

/// Right-censored survival data: observation times, event indicators and a
/// covariate matrix in which NaN marks a missing cell.
struct SurvivalDataset {
  Eigen::VectorXd times;       // strictly positive, finite
  Eigen::VectorXi status;      // 1 = event, 0 = censored
  Eigen::MatrixXd covariates;  // n x p, NaN = missing
  std::vector<std::string> ids;

  Eigen::Index n() const { return times.size(); }
  Eigen::Index p() const { return covariates.cols(); }
  Eigen::Index n_events() const { return status.cast<Eigen::Index>().sum(); }

  /// Throws InvalidInputError when the invariants do not hold.
  void validate() const;

  /// Row subset, preserving order of `rows`.
  SurvivalDataset subset(const std::vector<int>& rows) const;
};

/// Convenience constructor that validates.
SurvivalDataset make_dataset(Eigen::VectorXd times, Eigen::VectorXi status,
                             Eigen::MatrixXd covariates,
                             std::vector<std::string> ids = {});

}  // namespace survpls
