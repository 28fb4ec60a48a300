#pragma once

#include <Eigen/Core>

namespace survpls {

struct KernelSpec {
  enum class Kind { Linear, Gaussian };
  Kind kind = Kind::Linear;
  double sigma = 0.0;  // Gaussian bandwidth; <= 0 requests the median heuristic

  static KernelSpec linear() { return KernelSpec{Kind::Linear, 0.0}; }
  static KernelSpec gaussian(double sigma = 0.0) { return KernelSpec{Kind::Gaussian, sigma}; }
};

/// K[i,j] = <x1_i, x2_j> (linear) or exp(-|x1_i - x2_j|^2 / 2 sigma^2)
/// (Gaussian). Inputs must be complete and have matching column counts.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2,
                              const KernelSpec& spec);

/// Default Gaussian bandwidth: sigma^2 = median pairwise squared distance / 2.
double median_heuristic_sigma(const Eigen::MatrixXd& x);

}  // namespace survpls
