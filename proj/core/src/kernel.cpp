#include "survpls/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "survpls/errors.hpp"

namespace survpls {

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2,
                              const KernelSpec& spec) {
  if (x1.cols() != x2.cols()) {
    throw InvalidInputError("kernel_matrix: column count mismatch");
  }
  if (!x1.allFinite() || !x2.allFinite()) {
    throw InvalidInputError("kernel_matrix: inputs must be complete");
  }
  if (spec.kind == KernelSpec::Kind::Linear) {
    return x1 * x2.transpose();
  }
  const double sigma = spec.sigma > 0.0 ? spec.sigma : median_heuristic_sigma(x1);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd k(x1.rows(), x2.rows());
  for (Eigen::Index i = 0; i < x1.rows(); ++i) {
    for (Eigen::Index j = 0; j < x2.rows(); ++j) {
      k(i, j) = std::exp(-(x1.row(i) - x2.row(j)).squaredNorm() * inv);
    }
  }
  return k;
}

double median_heuristic_sigma(const Eigen::MatrixXd& x) {
  std::vector<double> d2;
  d2.reserve(static_cast<std::size_t>(x.rows()) * (x.rows() - 1) / 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      d2.push_back((x.row(i) - x.row(j)).squaredNorm());
    }
  }
  if (d2.empty()) return 1.0;
  const std::size_t mid = d2.size() / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
  const double med = d2[mid];
  return med > 0.0 ? std::sqrt(med / 2.0) : 1.0;
}

}  // namespace survpls
