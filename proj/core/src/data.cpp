#include "survpls/data.hpp"

#include <cmath>

#include "survpls/errors.hpp"

namespace survpls {

void SurvivalDataset::validate() const {
  const Eigen::Index nn = times.size();
  if (nn == 0) throw InvalidInputError("dataset: empty");
  if (status.size() != nn) throw InvalidInputError("dataset: status length mismatch");
  if (covariates.size() > 0 && covariates.rows() != nn) {
    throw InvalidInputError("dataset: covariate row count mismatch");
  }
  if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != nn) {
    throw InvalidInputError("dataset: id count mismatch");
  }
  for (Eigen::Index i = 0; i < nn; ++i) {
    if (!(times[i] > 0.0) || !std::isfinite(times[i])) {
      throw InvalidInputError("dataset: times must be strictly positive and finite");
    }
    if (status[i] != 0 && status[i] != 1) {
      throw InvalidInputError("dataset: status values must be 0 or 1");
    }
  }
}

SurvivalDataset SurvivalDataset::subset(const std::vector<int>& rows) const {
  SurvivalDataset out;
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  out.times.resize(m);
  out.status.resize(m);
  out.covariates.resize(m, covariates.cols());
  if (!ids.empty()) out.ids.reserve(rows.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    const int i = rows[static_cast<std::size_t>(k)];
    out.times[k] = times[i];
    out.status[k] = status[i];
    if (covariates.cols() > 0) out.covariates.row(k) = covariates.row(i);
    if (!ids.empty()) out.ids.push_back(ids[static_cast<std::size_t>(i)]);
  }
  return out;
}

SurvivalDataset make_dataset(Eigen::VectorXd times, Eigen::VectorXi status,
                             Eigen::MatrixXd covariates, std::vector<std::string> ids) {
  SurvivalDataset d;
  d.times = std::move(times);
  d.status = std::move(status);
  d.covariates = std::move(covariates);
  d.ids = std::move(ids);
  d.validate();
  return d;
}

}  // namespace survpls
