#include "survpls/pls.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "survpls/errors.hpp"

namespace survpls {

namespace {

inline bool observed(double v) { return !std::isnan(v); }

// Slope-form component: t_i = sum_j x_ij w_j / sum_j w_j^2, both sums over
// the cells available in row i. A row with no usable cell scores 0.
Eigen::VectorXd slope_scores(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double v = x(i, j);
      if (observed(v) && w[j] != 0.0) {
        num += v * w[j];
        den += w[j] * w[j];
      }
    }
    t[i] = den > 0.0 ? num / den : 0.0;
  }
  return t;
}

// Column loadings: p_j = sum_i x_ij t_i / sum_i t_i^2 over rows observed in j.
Eigen::VectorXd slope_loadings(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::VectorXd load(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = x(i, j);
      if (observed(v)) {
        num += v * t[i];
        den += t[i] * t[i];
      }
    }
    load[j] = den > 0.0 ? num / den : 0.0;
  }
  return load;
}

void deflate(Eigen::MatrixXd& x, const Eigen::VectorXd& t, const Eigen::VectorXd& load) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (load[j] == 0.0) continue;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (observed(x(i, j))) x(i, j) -= t[i] * load[j];
    }
  }
}

struct NipalsCore {
  Eigen::MatrixXd weights;   // p x m'
  Eigen::MatrixXd scores;    // n x m'
  Eigen::MatrixXd loadings;  // p x m'
  Eigen::VectorXd y_loadings;
  bool truncated = false;
};

// NIPALS on an already centered/scaled matrix and centered outcome.
NipalsCore nipals_core(const Eigen::MatrixXd& xs, const Eigen::VectorXd& yc, int m) {
  const Eigen::Index n = xs.rows();
  const Eigen::Index p = xs.cols();
  Eigen::MatrixXd xcur = xs;
  Eigen::VectorXd yres = yc;

  NipalsCore out;
  out.weights.resize(p, m);
  out.scores.resize(n, m);
  out.loadings.resize(p, m);
  out.y_loadings.resize(m);

  int h = 0;
  for (; h < m; ++h) {
    Eigen::VectorXd w(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double v = xcur(i, j);
        if (observed(v)) {
          num += v * yres[i];
          den += yres[i] * yres[i];
        }
      }
      w[j] = den > 0.0 ? num / den : 0.0;
    }
    const double norm = w.norm();
    if (norm < 1e-12) {
      out.truncated = true;
      break;
    }
    w /= norm;
    const Eigen::VectorXd t = slope_scores(xcur, w);
    const Eigen::VectorXd load = slope_loadings(xcur, t);
    const double tt = t.squaredNorm();
    const double c = tt > 0.0 ? yres.dot(t) / tt : 0.0;

    out.weights.col(h) = w;
    out.scores.col(h) = t;
    out.loadings.col(h) = load;
    out.y_loadings[h] = c;

    deflate(xcur, t, load);
    yres -= c * t;
  }
  out.weights.conservativeResize(p, h);
  out.scores.conservativeResize(n, h);
  out.loadings.conservativeResize(p, h);
  out.y_loadings.conservativeResize(h);
  return out;
}

// Implied regression vector in the scaled space: B = W (P'W)^-1 C.
Eigen::VectorXd implied_coefficients(const NipalsCore& core) {
  const int m = static_cast<int>(core.weights.cols());
  if (m == 0) return Eigen::VectorXd::Zero(core.weights.rows());
  const Eigen::MatrixXd pw = core.loadings.transpose() * core.weights;
  const Eigen::VectorXd g = pw.fullPivLu().solve(core.y_loadings);
  return core.weights * g;
}

std::vector<int> nonzero_indices(const Eigen::VectorXd& v) {
  std::vector<int> idx;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0) idx.push_back(static_cast<int>(j));
  }
  return idx;
}

}  // namespace

Eigen::MatrixXd Preprocess::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != means.size()) {
    throw InvalidInputError("preprocess: column count mismatch");
  }
  Eigen::MatrixXd out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (observed(out(i, j))) out(i, j) = (out(i, j) - means[j]) / scales[j];
    }
  }
  return out;
}

Eigen::MatrixXd Preprocess::invert(const Eigen::MatrixXd& xs) const {
  if (xs.cols() != means.size()) {
    throw InvalidInputError("preprocess: column count mismatch");
  }
  Eigen::MatrixXd out = xs;
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      if (observed(out(i, j))) out(i, j) = out(i, j) * scales[j] + means[j];
    }
  }
  return out;
}

Preprocess preprocess_fit(const Eigen::MatrixXd& x) {
  const Eigen::Index p = x.cols();
  Preprocess pre;
  pre.means.resize(p);
  pre.scales.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Eigen::Index cnt = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (observed(x(i, j))) {
        sum += x(i, j);
        ++cnt;
      }
    }
    if (cnt < 2) {
      throw InvalidInputError("preprocess: column " + std::to_string(j) +
                              " has fewer than 2 observed values");
    }
    const double mean = sum / static_cast<double>(cnt);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (observed(x(i, j))) ss += (x(i, j) - mean) * (x(i, j) - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(cnt - 1));
    if (!(sd > 0.0)) {
      throw InvalidInputError("preprocess: column " + std::to_string(j) + " is constant");
    }
    pre.means[j] = mean;
    pre.scales[j] = sd;
  }
  return pre;
}

Eigen::MatrixXd ComponentMap::transform(const Eigen::MatrixXd& x_raw) const {
  Eigen::MatrixXd xc = pre.apply(x_raw);
  const int m = n_components();
  Eigen::MatrixXd t(x_raw.rows(), m);
  for (int h = 0; h < m; ++h) {
    const Eigen::VectorXd th = slope_scores(xc, weights.col(h));
    t.col(h) = th;
    deflate(xc, th, loadings.col(h));
  }
  return t;
}

Eigen::VectorXd PlsFit::predict(const Eigen::MatrixXd& x_raw) const {
  const Eigen::MatrixXd t = map.transform(x_raw);
  return Eigen::VectorXd::Constant(x_raw.rows(), y_mean) + t * y_loadings;
}

PlsFit fit_pls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int m) {
  if (m < 1) throw InvalidInputError("fit_pls: m must be >= 1");
  if (x.rows() != y.size()) throw InvalidInputError("fit_pls: X/y length mismatch");
  const double y_mean = y.mean();
  const Eigen::VectorXd yc = y.array() - y_mean;
  if (yc.norm() == 0.0) throw InvalidInputError("fit_pls: y is constant");

  PlsFit fit;
  fit.requested_components = m;
  fit.map.pre = preprocess_fit(x);
  const Eigen::MatrixXd xs = fit.map.pre.apply(x);

  NipalsCore core = nipals_core(xs, yc, m);
  fit.map.weights = core.weights;
  fit.map.loadings = core.loadings;
  fit.scores = core.scores;
  fit.y_loadings = core.y_loadings;
  fit.y_mean = y_mean;
  fit.truncated = core.truncated;
  for (int h = 0; h < fit.n_components(); ++h) {
    fit.active_sets.push_back(nonzero_indices(fit.map.weights.col(h)));
  }

  const Eigen::VectorXd b_scaled = implied_coefficients(core);
  fit.coefficients = b_scaled.array() / fit.map.pre.scales.array();
  fit.intercept = y_mean - fit.coefficients.dot(fit.map.pre.means);
  return fit;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& z, double lambda) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double mag = std::abs(z[j]) - lambda / 2.0;
    out[j] = mag > 0.0 ? (z[j] > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

PlsFit fit_spls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int m, double eta) {
  if (m < 1) throw InvalidInputError("fit_spls: m must be >= 1");
  if (!(eta >= 0.0 && eta < 1.0)) throw InvalidInputError("fit_spls: eta must be in [0,1)");
  if (!x.allFinite()) throw InvalidInputError("fit_spls: X must be complete");
  if (x.rows() != y.size()) throw InvalidInputError("fit_spls: X/y length mismatch");
  const double y_mean = y.mean();
  const Eigen::VectorXd yc = y.array() - y_mean;
  if (yc.norm() == 0.0) throw InvalidInputError("fit_spls: y is constant");

  const Eigen::Index p = x.cols();
  PlsFit fit;
  fit.requested_components = m;
  fit.map.pre = preprocess_fit(x);
  const Eigen::MatrixXd xs = fit.map.pre.apply(x);

  Eigen::VectorXd y1 = yc;
  std::set<int> active;
  NipalsCore refit;
  Eigen::MatrixXd x_active;
  std::vector<int> active_sorted;
  std::vector<std::vector<int>> snapshots;

  for (int h = 1; h <= m; ++h) {
    Eigen::VectorXd z_raw = xs.transpose() * y1;
    const double nz = z_raw.norm();
    if (nz < 1e-12) {
      if (h == 1) {
        throw EmptyModelError("fit_spls: direction vector vanished at the first step");
      }
      fit.truncated = true;
      break;
    }
    const Eigen::VectorXd z = z_raw / nz;
    const double lambda = 2.0 * eta * z.cwiseAbs().maxCoeff();
    const Eigen::VectorXd w = soft_threshold(z, lambda);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (w[j] != 0.0) active.insert(static_cast<int>(j));
    }

    active_sorted.assign(active.begin(), active.end());
    x_active.resize(xs.rows(), static_cast<Eigen::Index>(active_sorted.size()));
    for (std::size_t c = 0; c < active_sorted.size(); ++c) {
      x_active.col(static_cast<Eigen::Index>(c)) = xs.col(active_sorted[c]);
    }

    refit = nipals_core(x_active, yc, h);
    if (refit.weights.cols() < h) {
      fit.truncated = true;
      snapshots.resize(static_cast<std::size_t>(refit.weights.cols()), active_sorted);
      break;
    }
    snapshots.push_back(active_sorted);

    const Eigen::VectorXd b_active = implied_coefficients(refit);
    y1 = yc - x_active * b_active;
  }

  const int got = static_cast<int>(refit.weights.cols());
  fit.map.weights = Eigen::MatrixXd::Zero(p, got);
  fit.map.loadings = Eigen::MatrixXd::Zero(p, got);
  for (std::size_t c = 0; c < active_sorted.size(); ++c) {
    fit.map.weights.row(active_sorted[c]) = refit.weights.row(static_cast<Eigen::Index>(c));
    fit.map.loadings.row(active_sorted[c]) = refit.loadings.row(static_cast<Eigen::Index>(c));
  }
  fit.scores = refit.scores;
  fit.y_loadings = refit.y_loadings;
  fit.y_mean = y_mean;
  fit.active_sets = std::move(snapshots);

  const Eigen::VectorXd b_active = implied_coefficients(refit);
  fit.coefficients = Eigen::VectorXd::Zero(p);
  for (std::size_t c = 0; c < active_sorted.size(); ++c) {
    fit.coefficients[active_sorted[c]] =
        b_active[static_cast<Eigen::Index>(c)] / fit.map.pre.scales[active_sorted[c]];
  }
  fit.intercept = y_mean - fit.coefficients.dot(fit.map.pre.means);
  return fit;
}

}  // namespace survpls
