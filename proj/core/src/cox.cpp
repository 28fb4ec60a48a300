#include "survpls/cox.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "survpls/errors.hpp"

namespace survpls {

namespace {

std::vector<int> time_order(const Eigen::VectorXd& times) {
  std::vector<int> order(static_cast<std::size_t>(times.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return times[a] > times[b]; });
  return order;  // decreasing time
}

void check_complete(const Eigen::MatrixXd& x) {
  if (x.size() > 0 && !x.allFinite()) {
    throw InvalidInputError("cox: covariates contain missing or non-finite cells");
  }
}

// Walks observations in decreasing time, maintaining the risk-set sums
// S0 = sum exp(eta), S1 = sum x exp(eta), S2 = sum x x' exp(eta).
// Linear predictors are shifted by their maximum before exponentiating.
struct RiskSetWalk {
  const Eigen::VectorXd& times;
  const Eigen::VectorXi& status;
  const Eigen::VectorXd& eta;
  double shift;

  template <typename PerEvent>
  void run(PerEvent&& per_event) const {
    const std::vector<int> order = time_order(times);
    const Eigen::Index n = times.size();
    double s0 = 0.0;
    std::size_t k = 0;
    while (k < order.size()) {
      const double t = times[order[k]];
      std::size_t g = k;
      while (g < order.size() && times[order[g]] == t) ++g;
      for (std::size_t j = k; j < g; ++j) {
        per_event.enter(order[j], std::exp(eta[order[j]] - shift));
      }
      s0 = per_event.s0();
      for (std::size_t j = k; j < g; ++j) {
        const int i = order[j];
        if (status[i] == 1) per_event.event(i, t, s0);
      }
      k = g;
    }
    (void)n;
  }
};

}  // namespace

CoxEval cox_eval(const SurvivalDataset& data, const Eigen::VectorXd& beta) {
  data.validate();
  check_complete(data.covariates);
  const Eigen::Index q = data.p();
  if (beta.size() != q) throw InvalidInputError("cox_eval: beta dimension mismatch");

  const Eigen::VectorXd eta =
      q > 0 ? Eigen::VectorXd(data.covariates * beta) : Eigen::VectorXd::Zero(data.n());
  const double shift = eta.size() > 0 ? eta.maxCoeff() : 0.0;

  struct Acc {
    const Eigen::MatrixXd& x;
    const Eigen::VectorXd& eta;
    double shift;
    double s0_ = 0.0;
    Eigen::VectorXd s1;
    Eigen::MatrixXd s2;
    double loglik = 0.0;
    Eigen::VectorXd score;
    Eigen::MatrixXd info;

    void enter(int i, double w) {
      s0_ += w;
      if (x.cols() > 0) {
        s1.noalias() += w * x.row(i).transpose();
        s2.noalias() += w * (x.row(i).transpose() * x.row(i));
      }
    }
    double s0() const { return s0_; }
    void event(int i, double /*t*/, double s0) {
      loglik += eta[i] - shift - std::log(s0);
      if (x.cols() > 0) {
        const Eigen::VectorXd mean = s1 / s0;
        score.noalias() += x.row(i).transpose() - mean;
        info.noalias() += s2 / s0 - mean * mean.transpose();
      }
    }
  };

  Acc acc{data.covariates, eta, shift};
  acc.s1 = Eigen::VectorXd::Zero(q);
  acc.s2 = Eigen::MatrixXd::Zero(q, q);
  acc.score = Eigen::VectorXd::Zero(q);
  acc.info = Eigen::MatrixXd::Zero(q, q);
  RiskSetWalk{data.times, data.status, eta, shift}.run(acc);

  CoxEval out;
  out.loglik = acc.loglik;
  out.score = std::move(acc.score);
  out.information = std::move(acc.info);
  return out;
}

double cox_loglik_at_lp(const Eigen::VectorXd& times, const Eigen::VectorXi& status,
                        const Eigen::VectorXd& lp) {
  if (times.size() != status.size() || times.size() != lp.size()) {
    throw InvalidInputError("cox_loglik_at_lp: length mismatch");
  }
  if (times.size() == 0) return 0.0;
  const double shift = lp.maxCoeff();

  struct Acc {
    const Eigen::VectorXd& lp;
    double shift;
    double s0_ = 0.0;
    double loglik = 0.0;
    void enter(int i, double w) {
      (void)i;
      s0_ += w;
    }
    double s0() const { return s0_; }
    void event(int i, double, double s0) { loglik += lp[i] - shift - std::log(s0); }
  };
  Acc acc{lp, shift};
  RiskSetWalk{times, status, lp, shift}.run(acc);
  return acc.loglik;
}

StepFunction breslow_baseline(const Eigen::VectorXd& times, const Eigen::VectorXi& status,
                              const Eigen::VectorXd& lp) {
  if (times.size() != status.size() || times.size() != lp.size()) {
    throw InvalidInputError("breslow_baseline: length mismatch");
  }
  const double shift = lp.size() > 0 ? lp.maxCoeff() : 0.0;

  struct Acc {
    double shift;
    double s0_ = 0.0;
    // one increment per distinct event time, collected in decreasing time
    std::vector<double> event_times;
    std::vector<double> increments;
    void enter(int, double w) { s0_ += w; }
    double s0() const { return s0_; }
    void event(int, double t, double s0) {
      if (!event_times.empty() && event_times.back() == t) {
        increments.back() += 1.0 / s0;
      } else {
        event_times.push_back(t);
        increments.push_back(1.0 / s0);
      }
    }
  };
  Acc acc{shift};
  RiskSetWalk{times, status, lp, shift}.run(acc);

  std::reverse(acc.event_times.begin(), acc.event_times.end());
  std::reverse(acc.increments.begin(), acc.increments.end());
  std::vector<double> values(acc.increments.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < acc.increments.size(); ++i) {
    // undo the stability shift: true S0 = s0_shifted * exp(shift)
    cum += acc.increments[i] * std::exp(-shift);
    values[i] = cum;
  }
  return StepFunction(std::move(acc.event_times), std::move(values), 0.0);
}

CoxFit fit_cox(const SurvivalDataset& data, const Eigen::VectorXd& init,
               const CoxOptions& options) {
  data.validate();
  check_complete(data.covariates);
  if (data.n_events() == 0) throw InvalidInputError("fit_cox: no events");
  const Eigen::Index q = data.p();

  Eigen::VectorXd beta = init.size() == 0 ? Eigen::VectorXd::Zero(q) : init;
  if (beta.size() != q) throw InvalidInputError("fit_cox: init dimension mismatch");

  // Center columns; the partial likelihood is exactly invariant and the
  // information matrix is better conditioned.
  SurvivalDataset centered = data;
  Eigen::RowVectorXd means = Eigen::RowVectorXd::Zero(q);
  if (q > 0) {
    means = data.covariates.colwise().mean();
    centered.covariates.rowwise() -= means;
  }

  CoxFit fit;
  fit.n_obs = data.n();
  fit.n_events = data.n_events();
  fit.loglik_null = cox_eval(centered, Eigen::VectorXd::Zero(q)).loglik;

  CoxEval cur = cox_eval(centered, beta);
  if (!std::isfinite(cur.loglik)) {
    throw MonotoneLikelihoodError("fit_cox: non-finite partial likelihood at the start");
  }

  int iter = 0;
  bool converged = q == 0 || cur.score.lpNorm<Eigen::Infinity>() <= options.tol_score;
  for (; iter < options.max_iter && q > 0; ++iter) {
    Eigen::MatrixXd info = cur.information;
    // tiny ridge keeps the solve defined when components are collinear
    const double ridge = 1e-12 * std::max(1.0, info.trace());
    info.diagonal().array() += ridge;
    Eigen::VectorXd step = info.ldlt().solve(cur.score);

    bool accepted = false;
    double last_finite_loglik = cur.loglik;
    for (int h = 0; h <= options.max_halvings; ++h) {
      const Eigen::VectorXd cand = beta + step;
      const CoxEval eval = cox_eval(centered, cand);
      if (std::isfinite(eval.loglik) && eval.loglik >= cur.loglik - 1e-12) {
        const double delta = eval.loglik - cur.loglik;
        beta = cand;
        cur = eval;
        accepted = true;
        converged = std::abs(delta) <= options.tol_loglik &&
                    cur.score.lpNorm<Eigen::Infinity>() <= options.tol_score;
        break;
      }
      if (std::isfinite(eval.loglik)) last_finite_loglik = eval.loglik;
      step *= 0.5;
    }
    if (!accepted) {
      if (!std::isfinite(last_finite_loglik)) {
        throw MonotoneLikelihoodError("fit_cox: likelihood diverged");
      }
      // no improving step remains; report the current (finite) iterate
      converged = cur.score.lpNorm<Eigen::Infinity>() <= options.tol_score;
      ++iter;
      break;
    }
    if (beta.lpNorm<Eigen::Infinity>() > options.beta_bound) {
      fit.monotone_likelihood = true;
      ++iter;
      break;
    }
    if (converged) {
      ++iter;
      break;
    }
  }

  fit.beta = beta;
  fit.loglik = cur.loglik;
  fit.score = cur.score;
  fit.information = cur.information;
  fit.converged = converged && !fit.monotone_likelihood;
  fit.iterations = iter;

  const Eigen::VectorXd lp =
      q > 0 ? Eigen::VectorXd(data.covariates * beta) : Eigen::VectorXd::Zero(data.n());
  fit.baseline_cumhaz = breslow_baseline(data.times, data.status, lp);
  return fit;
}

CoxFit fit_cox(const SurvivalDataset& data, const Eigen::VectorXd& init, int max_iter,
               double tol) {
  CoxOptions opts;
  opts.max_iter = max_iter;
  opts.tol_score = tol;
  return fit_cox(data, init, opts);
}

ResidualSet residuals(const CoxFit& fit, const SurvivalDataset& data) {
  data.validate();
  check_complete(data.covariates);
  if (fit.beta.size() != data.p()) {
    throw InvalidInputError("residuals: fit/data dimension mismatch");
  }
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.p();
  const Eigen::VectorXd lp =
      q > 0 ? Eigen::VectorXd(data.covariates * fit.beta) : Eigen::VectorXd::Zero(n);

  ResidualSet out;
  out.martingale.resize(n);
  out.deviance.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double expected = fit.baseline_cumhaz(data.times[i]) * std::exp(lp[i]);
    const double m = static_cast<double>(data.status[i]) - expected;
    out.martingale[i] = m;
    // delta = 0 makes the log term vanish (standard limit convention)
    double inside = -m;
    if (data.status[i] == 1) inside -= std::log(1.0 - m);
    const double d = (m > 0 ? 1.0 : (m < 0 ? -1.0 : 0.0)) *
                     std::sqrt(std::max(0.0, 2.0 * inside));
    out.deviance[i] = d;
  }

  // Schoenfeld residuals: covariate minus the risk-set weighted mean, one
  // row per event in increasing event time.
  const double shift = lp.maxCoeff();
  struct Acc {
    const Eigen::MatrixXd& x;
    double s0_ = 0.0;
    Eigen::VectorXd s1;
    std::vector<std::pair<double, Eigen::VectorXd>> rows;  // decreasing time
    void enter(int i, double w) {
      s0_ += w;
      if (x.cols() > 0) s1.noalias() += w * x.row(i).transpose();
    }
    double s0() const { return s0_; }
    void event(int i, double t, double s0) {
      if (x.cols() == 0) {
        rows.emplace_back(t, Eigen::VectorXd());
        return;
      }
      rows.emplace_back(t, Eigen::VectorXd(x.row(i).transpose() - s1 / s0));
    }
  };
  Acc acc{data.covariates};
  acc.s1 = Eigen::VectorXd::Zero(q);
  RiskSetWalk{data.times, data.status, lp, shift}.run(acc);
  std::reverse(acc.rows.begin(), acc.rows.end());

  out.schoenfeld.resize(static_cast<Eigen::Index>(acc.rows.size()), q);
  out.schoenfeld_times.resize(static_cast<Eigen::Index>(acc.rows.size()));
  for (std::size_t r = 0; r < acc.rows.size(); ++r) {
    out.schoenfeld_times[static_cast<Eigen::Index>(r)] = acc.rows[r].first;
    if (q > 0) out.schoenfeld.row(static_cast<Eigen::Index>(r)) = acc.rows[r].second;
  }
  return out;
}

Eigen::VectorXd null_deviance_residuals(const SurvivalDataset& data) {
  data.validate();
  if (data.n_events() == 0) {
    throw InvalidInputError("null_deviance_residuals: no events");
  }
  SurvivalDataset bare;
  bare.times = data.times;
  bare.status = data.status;
  bare.covariates.resize(data.n(), 0);
  const CoxFit fit = fit_cox(bare, Eigen::VectorXd());
  return residuals(fit, bare).deviance;
}

}  // namespace survpls
