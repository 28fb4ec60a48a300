#include "survpls/simulate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "survpls/errors.hpp"

namespace survpls {

std::string sim_type_name(SimType s) {
  switch (s) {
    case SimType::Eigengene: return "eigengene";
    case SimType::Cluster: return "cluster";
    case SimType::Factorial: return "factorial";
  }
  return "?";
}

SimType sim_type_from_name(const std::string& name) {
  for (SimType s : {SimType::Eigengene, SimType::Cluster, SimType::Factorial}) {
    if (sim_type_name(s) == name) return s;
  }
  throw InvalidInputError("unknown simulation type: " + name);
}

std::string link_type_name(LinkType l) {
  switch (l) {
    case LinkType::None: return "none";
    case LinkType::Linear: return "linear";
    case LinkType::Quadratic: return "quadratic";
  }
  return "?";
}

LinkType link_type_from_name(const std::string& name) {
  for (LinkType l : {LinkType::None, LinkType::Linear, LinkType::Quadratic}) {
    if (link_type_name(l) == name) return l;
  }
  throw InvalidInputError("unknown link type: " + name);
}

void SimConfig::validate() const {
  if (n < 2) throw InvalidInputError("sim config: n must be >= 2");
  if (p < 1) throw InvalidInputError("sim config: p must be >= 1");
  if (!(censor_target > 0.0 && censor_target < 1.0)) {
    throw InvalidInputError("sim config: censor_target must be in (0,1)");
  }
  if (sim_type == SimType::Eigengene && modules * module_size > p) {
    throw InvalidInputError("sim config: module sizes exceed p");
  }
  if (sim_type == SimType::Factorial && groups * group_size > p) {
    throw InvalidInputError("sim config: group sizes exceed p");
  }
}

namespace {

Eigen::MatrixXd normal_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

ExpressionData gen_eigengene(const SimConfig& cfg, Rng& rng) {
  ExpressionData out;
  out.x.resize(cfg.n, cfg.p);
  out.labels.assign(static_cast<std::size_t>(cfg.p), 0);
  out.seeds.resize(cfg.n, cfg.modules);

  int col = 0;
  for (int mod = 0; mod < cfg.modules; ++mod) {
    Eigen::VectorXd seed(cfg.n);
    for (int i = 0; i < cfg.n; ++i) seed[i] = rng.normal();
    out.seeds.col(mod) = seed;
    for (int k = 1; k <= cfg.module_size; ++k) {
      const double r = 1.0 - static_cast<double>(k) / cfg.module_size * (1.0 - cfg.r_min);
      const double a = std::sqrt(1.0 / (r * r) - 1.0);
      for (int i = 0; i < cfg.n; ++i) out.x(i, col) = seed[i] + a * rng.normal();
      out.labels[static_cast<std::size_t>(col)] = mod + 1;
      ++col;
    }
  }
  for (; col < cfg.p; ++col) {
    for (int i = 0; i < cfg.n; ++i) out.x(i, col) = rng.normal();
  }
  // first two modules carry the hazard link
  const int n_rel = std::min(2 * cfg.module_size, cfg.modules * cfg.module_size);
  for (int j = 0; j < n_rel; ++j) out.relevant.push_back(j);
  return out;
}

ExpressionData gen_cluster(const SimConfig& cfg, Rng& rng) {
  ExpressionData out;
  out.x.resize(cfg.n, cfg.p);
  out.labels.assign(static_cast<std::size_t>(cfg.p), 0);
  const int structured = std::min(50, cfg.p);
  const int half = cfg.n / 2;
  for (int i = 0; i < cfg.n; ++i) {
    for (int j = 0; j < cfg.p; ++j) {
      double mean = 3.5;
      if (j < structured) mean = i < half ? 3.0 : 4.0;
      out.x(i, j) = mean + rng.normal();
    }
  }
  for (int j = 0; j < structured; ++j) {
    out.labels[static_cast<std::size_t>(j)] = 1;
    out.relevant.push_back(j);
  }
  return out;
}

ExpressionData gen_factorial(const SimConfig& cfg, Rng& rng) {
  ExpressionData out;
  out.x.resize(cfg.n, cfg.p);
  out.labels.assign(static_cast<std::size_t>(cfg.p), 0);

  const int k = cfg.group_size;
  // compound symmetry factor: R = F F' with F from the PCA of R
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(k, k, cfg.group_cor);
  r.diagonal().setOnes();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
  const Eigen::MatrixXd f =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  int col = 0;
  for (int grp = 0; grp < cfg.groups; ++grp) {
    const Eigen::MatrixXd e = normal_matrix(k, cfg.n, rng);  // k x n
    const Eigen::MatrixXd z = f * e;                         // genes x observations
    for (int g = 0; g < k; ++g, ++col) {
      out.x.col(col) = z.row(g).transpose();
      out.labels[static_cast<std::size_t>(col)] = grp + 1;
    }
  }
  for (; col < cfg.p; ++col) {
    for (int i = 0; i < cfg.n; ++i) out.x(i, col) = rng.normal();
  }
  const int n_rel = std::min(2 * cfg.group_size, cfg.groups * cfg.group_size);
  for (int j = 0; j < n_rel; ++j) out.relevant.push_back(j);
  return out;
}

}  // namespace

ExpressionData gen_expression(const SimConfig& config, Rng& rng) {
  config.validate();
  switch (config.sim_type) {
    case SimType::Eigengene: return gen_eigengene(config, rng);
    case SimType::Cluster: return gen_cluster(config, rng);
    case SimType::Factorial: return gen_factorial(config, rng);
  }
  throw InvalidInputError("gen_expression: bad sim type");
}

SurvivalDraw gen_survival(const Eigen::MatrixXd& x, const std::vector<int>& relevant,
                          LinkType link, double strength, double censor_target, Rng& rng) {
  const Eigen::Index n = x.rows();
  for (int j : relevant) {
    if (j < 0 || j >= x.cols()) throw InvalidInputError("gen_survival: relevant index out of range");
  }
  if (!(censor_target > 0.0 && censor_target < 1.0)) {
    throw InvalidInputError("gen_survival: censor_target must be in (0,1)");
  }

  SurvivalDraw out;
  out.lp = Eigen::VectorXd::Zero(n);
  if (link != LinkType::None) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j : relevant) {
        const double v = x(i, j);
        acc += link == LinkType::Linear ? v : (v * v - 1.0);
      }
      out.lp[i] = strength * acc;
    }
  }

  // Event rate per subject; lp is clamped only inside exp to avoid overflow.
  Eigen::VectorXd rate(n);
  for (Eigen::Index i = 0; i < n; ++i) rate[i] = std::exp(std::clamp(out.lp[i], -500.0, 500.0));

  // Calibrate the censoring rate by bisection on the exact expected censored
  // fraction (1/n) sum theta / (theta + rate_i), which is monotone in theta.
  const auto expected_censored = [&](double theta) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += theta / (theta + rate[i]);
    return acc / static_cast<double>(n);
  };
  double lo = 1e-18, hi = 1e18;
  if (expected_censored(lo) > censor_target || expected_censored(hi) < censor_target) {
    throw InvalidInputError("gen_survival: censoring calibration failed to bracket target " +
                            std::to_string(censor_target));
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);  // bisect in log space
    if (expected_censored(mid) < censor_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.theta = std::sqrt(lo * hi);

  out.times.resize(n);
  out.status.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t_event = rng.exponential(rate[i]);
    const double t_cens = rng.exponential(out.theta);
    out.times[i] = std::min(t_event, t_cens);
    out.status[i] = t_event <= t_cens ? 1 : 0;
  }
  return out;
}

SimulatedDataset simulate_dataset(const SimConfig& config) {
  config.validate();
  Rng x_rng = Rng::derive(config.seed, {1});
  Rng t_rng = Rng::derive(config.seed, {2});

  ExpressionData expr = gen_expression(config, x_rng);
  SurvivalDraw draw = gen_survival(expr.x, expr.relevant, config.link,
                                   config.link_strength, config.censor_target, t_rng);

  SimulatedDataset out;
  out.data.times = std::move(draw.times);
  out.data.status = std::move(draw.status);
  out.data.covariates = std::move(expr.x);
  out.data.ids.reserve(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) out.data.ids.push_back("s" + std::to_string(i + 1));
  out.relevant = std::move(expr.relevant);
  out.true_lp = std::move(draw.lp);
  out.labels = std::move(expr.labels);
  out.theta = draw.theta;
  out.realized_censoring =
      1.0 - static_cast<double>(out.data.status.sum()) / static_cast<double>(config.n);
  out.config = config;
  out.data.validate();
  return out;
}

SplitResult train_test_split(const SurvivalDataset& data, double train_fraction, Rng& rng) {
  data.validate();
  const Eigen::Index n = data.n();
  if (n < 10) throw InvalidInputError("train_test_split: need at least 10 observations");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidInputError("train_test_split: fraction must be in (0,1)");
  }

  std::vector<int> events, censored;
  for (Eigen::Index i = 0; i < n; ++i) {
    (data.status[i] == 1 ? events : censored).push_back(static_cast<int>(i));
  }

  SplitResult out;
  const int n_train_total = static_cast<int>(std::lround(train_fraction * static_cast<double>(n)));

  const bool can_stratify =
      (events.empty() || events.size() >= 2) && (censored.empty() || censored.size() >= 2);
  if (!can_stratify) {
    out.fallback_random = true;
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    out.train.assign(idx.begin(), idx.begin() + n_train_total);
    out.test.assign(idx.begin() + n_train_total, idx.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
  }

  // apportion training slots by class size (largest remainder)
  const double share_e = train_fraction * static_cast<double>(events.size());
  int train_e = static_cast<int>(std::floor(share_e));
  int train_c = n_train_total - train_e;
  if (train_c > static_cast<int>(censored.size())) {
    train_e += train_c - static_cast<int>(censored.size());
    train_c = static_cast<int>(censored.size());
  }
  if (train_e > static_cast<int>(events.size())) {
    train_c += train_e - static_cast<int>(events.size());
    train_e = static_cast<int>(events.size());
  }

  const auto allocate = [&](std::vector<int>& cls, int n_train_cls) {
    std::sort(cls.begin(), cls.end(),
              [&](int a, int b) { return data.times[a] < data.times[b]; });
    const int m = static_cast<int>(cls.size());
    const int n_test_cls = m - n_train_cls;
    std::vector<bool> is_test(static_cast<std::size_t>(m), false);
    if (n_test_cls > 0) {
      // one test pick per stride of the time-ordered list; the stride
      // windows are disjoint and nonempty because stride >= 1
      const double stride = static_cast<double>(m) / n_test_cls;
      for (int k = 0; k < n_test_cls; ++k) {
        const int lo_i = static_cast<int>(std::floor(k * stride));
        const int hi_i = std::min(m, static_cast<int>(std::floor((k + 1) * stride)));
        int pick = lo_i;
        if (hi_i - lo_i > 1) {
          pick = lo_i + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi_i - lo_i)));
        }
        is_test[static_cast<std::size_t>(std::min(pick, m - 1))] = true;
      }
    }
    for (int i = 0; i < m; ++i) {
      (is_test[static_cast<std::size_t>(i)] ? out.test : out.train).push_back(cls[static_cast<std::size_t>(i)]);
    }
  };
  allocate(events, train_e);
  allocate(censored, train_c);
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace survpls
