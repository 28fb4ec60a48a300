#include "survpls/models.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "survpls/errors.hpp"

namespace survpls {

namespace {

using nlohmann::json;

inline bool observed(double v) { return !std::isnan(v); }

double wald_p_value(double coef, double var) {
  if (!(var > 0.0) || !std::isfinite(coef)) return 1.0;
  const double z = std::abs(coef) / std::sqrt(var);
  return std::erfc(z / std::sqrt(2.0));
}

CoxFit cox_on_scores(const SurvivalDataset& data, const Eigen::MatrixXd& scores) {
  SurvivalDataset comp;
  comp.times = data.times;
  comp.status = data.status;
  comp.covariates = scores;
  return fit_cox(comp, Eigen::VectorXd::Zero(scores.cols()));
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i];
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index cols_hint = 0) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : cols_hint;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::PlsCox: return "PLS-Cox";
    case Method::AutoPlsCox: return "autoPLS-Cox";
    case Method::CoxPls: return "Cox-PLS";
    case Method::Plsdr: return "PLSDR";
    case Method::SPlsdr: return "sPLSDR";
    case Method::DkPlsdr: return "DKPLSDR";
    case Method::DkSPlsdr: return "DKsPLSDR";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::PlsCox, Method::AutoPlsCox, Method::CoxPls, Method::Plsdr,
                   Method::SPlsdr, Method::DkPlsdr, Method::DkSPlsdr}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidInputError("unknown method: " + name);
}

Eigen::VectorXd FittedSurvivalModel::predict_lp(const Eigen::MatrixXd& x_new) const {
  Eigen::MatrixXd design;
  if (kernel.has_value()) {
    if (x_new.cols() != train_x.cols()) {
      throw InvalidInputError("predict_lp: column count differs from training data");
    }
    design = kernel_matrix(x_new, train_x, *kernel);
  } else {
    if (x_new.cols() != map.pre.means.size()) {
      throw InvalidInputError("predict_lp: column count differs from training data");
    }
    design = x_new;
  }
  if (n_components == 0) return Eigen::VectorXd::Zero(x_new.rows());
  const Eigen::MatrixXd t = map.transform(design);
  return t * cox.beta;
}

Eigen::MatrixXd FittedSurvivalModel::predict_survival(
    const Eigen::MatrixXd& x_new, const std::vector<double>& eval_times) const {
  for (std::size_t k = 0; k < eval_times.size(); ++k) {
    if (eval_times[k] < 0.0 || (k > 0 && eval_times[k] < eval_times[k - 1])) {
      throw InvalidInputError("predict_survival: eval_times must be sorted and >= 0");
    }
  }
  const Eigen::VectorXd lp = predict_lp(x_new);
  Eigen::MatrixXd s(x_new.rows(), static_cast<Eigen::Index>(eval_times.size()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double risk = std::exp(lp[i]);
    for (std::size_t k = 0; k < eval_times.size(); ++k) {
      s(i, static_cast<Eigen::Index>(k)) =
          std::exp(-cox.baseline_cumhaz(eval_times[k]) * risk);
    }
  }
  return s;
}

FittedSurvivalModel fit_plscox(const SurvivalDataset& data, int m,
                               std::optional<double> sparse_eta, bool auto_stop) {
  data.validate();
  if (data.n_events() == 0) throw InvalidInputError("fit_plscox: no events");
  if (auto_stop && !sparse_eta.has_value()) {
    throw InvalidInputError("fit_plscox: auto mode needs a significance level");
  }
  if (!auto_stop && m < 1) throw InvalidInputError("fit_plscox: m must be >= 1");
  const int cap = auto_stop ? (m >= 1 ? m : 10) : m;

  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  Preprocess pre = preprocess_fit(data.covariates);
  Eigen::MatrixXd xcur = pre.apply(data.covariates);

  std::vector<Eigen::VectorXd> ws, loads, ts;
  for (int h = 0; h < cap; ++h) {
    Eigen::MatrixXd t_prev(n, h);
    for (int c = 0; c < h; ++c) t_prev.col(c) = ts[static_cast<std::size_t>(c)];

    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      std::vector<int> rows;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (observed(xcur(i, j))) rows.push_back(static_cast<int>(i));
      }
      if (rows.size() < 3) continue;
      SurvivalDataset sub;
      sub.times.resize(static_cast<Eigen::Index>(rows.size()));
      sub.status.resize(static_cast<Eigen::Index>(rows.size()));
      sub.covariates.resize(static_cast<Eigen::Index>(rows.size()), h + 1);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const Eigen::Index k = static_cast<Eigen::Index>(r);
        sub.times[k] = data.times[rows[r]];
        sub.status[k] = data.status[rows[r]];
        for (int c = 0; c < h; ++c) sub.covariates(k, c) = t_prev(rows[r], c);
        sub.covariates(k, h) = xcur(rows[r], j);
      }
      if (sub.status.sum() == 0) continue;
      try {
        const CoxFit f = fit_cox(sub, Eigen::VectorXd::Zero(h + 1));
        const double coef = f.beta[h];
        if (sparse_eta.has_value()) {
          Eigen::MatrixXd info = f.information;
          info.diagonal().array() += 1e-12 * std::max(1.0, info.trace());
          const Eigen::MatrixXd cov = info.llt().solve(
              Eigen::MatrixXd::Identity(h + 1, h + 1));
          if (wald_p_value(coef, cov(h, h)) > *sparse_eta) continue;
        }
        w[j] = coef;
      } catch (const Error&) {
        // degenerate column on this subset; leave its weight at zero
      }
    }

    const double norm = w.norm();
    if (norm < 1e-12) break;
    w /= norm;

    // slope-form component over available cells
    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (w[j] != 0.0 && observed(xcur(i, j))) {
          num += xcur(i, j) * w[j];
          den += w[j] * w[j];
        }
      }
      t[i] = den > 0.0 ? num / den : 0.0;
    }
    Eigen::VectorXd load(p);
    const double tt = t.squaredNorm();
    for (Eigen::Index j = 0; j < p; ++j) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (observed(xcur(i, j))) {
          num += xcur(i, j) * t[i];
          den += t[i] * t[i];
        }
      }
      load[j] = den > 0.0 ? num / den : 0.0;
    }
    (void)tt;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (load[j] == 0.0) continue;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (observed(xcur(i, j))) xcur(i, j) -= t[i] * load[j];
      }
    }
    ws.push_back(w);
    loads.push_back(load);
    ts.push_back(t);
  }

  const int got = static_cast<int>(ws.size());
  if (!auto_stop && got == 0) {
    throw EmptyModelError("fit_plscox: no component survived the significance screen");
  }

  FittedSurvivalModel model;
  model.method = auto_stop ? Method::AutoPlsCox : Method::PlsCox;
  model.eta = sparse_eta;
  model.n_components = got;
  model.map.pre = std::move(pre);
  model.map.weights.resize(p, got);
  model.map.loadings.resize(p, got);
  Eigen::MatrixXd scores(n, got);
  for (int h = 0; h < got; ++h) {
    model.map.weights.col(h) = ws[static_cast<std::size_t>(h)];
    model.map.loadings.col(h) = loads[static_cast<std::size_t>(h)];
    scores.col(h) = ts[static_cast<std::size_t>(h)];
  }
  model.cox = cox_on_scores(data, scores);
  model.training_lp = got > 0 ? Eigen::VectorXd(scores * model.cox.beta)
                              : Eigen::VectorXd::Zero(n);
  return model;
}

FittedSurvivalModel fit_coxpls(const SurvivalDataset& data, int m) {
  data.validate();
  if (data.n_events() == 0) throw InvalidInputError("fit_coxpls: no events");
  if (m < 1) throw InvalidInputError("fit_coxpls: m must be >= 1");

  const PlsFit pls = fit_pls(data.covariates, data.times, m);
  FittedSurvivalModel model;
  model.method = Method::CoxPls;
  model.n_components = pls.n_components();
  model.map = pls.map;
  model.cox = cox_on_scores(data, pls.scores);
  model.training_lp = pls.scores * model.cox.beta;
  return model;
}

FittedSurvivalModel fit_plsdr(const SurvivalDataset& data, int m,
                              std::optional<double> eta,
                              std::optional<KernelSpec> kernel) {
  data.validate();
  if (data.n_events() == 0) throw InvalidInputError("fit_plsdr: no events");
  if (m < 1) throw InvalidInputError("fit_plsdr: m must be >= 1");

  const Eigen::VectorXd d = null_deviance_residuals(data);

  FittedSurvivalModel model;
  if (kernel.has_value()) {
    KernelSpec spec = *kernel;
    if (spec.kind == KernelSpec::Kind::Gaussian && spec.sigma <= 0.0) {
      spec.sigma = median_heuristic_sigma(data.covariates);
    }
    model.kernel = spec;
    model.train_x = data.covariates;
  }
  const Eigen::MatrixXd design =
      model.kernel.has_value() ? kernel_matrix(data.covariates, data.covariates, *model.kernel)
                               : data.covariates;

  const PlsFit pls = eta.has_value() ? fit_spls(design, d, m, *eta) : fit_pls(design, d, m);
  model.method = model.kernel.has_value()
                     ? (eta.has_value() ? Method::DkSPlsdr : Method::DkPlsdr)
                     : (eta.has_value() ? Method::SPlsdr : Method::Plsdr);
  model.eta = eta;
  model.n_components = pls.n_components();
  model.map = pls.map;
  model.cox = cox_on_scores(data, pls.scores);
  model.training_lp = pls.scores * model.cox.beta;
  return model;
}

std::string serialize_model(const FittedSurvivalModel& model) {
  json doc;
  doc["format"] = "survpls-model";
  doc["format_version"] = 1;
  doc["method"] = method_name(model.method);
  doc["n_components"] = model.n_components;
  if (model.eta.has_value()) doc["eta"] = *model.eta;
  if (model.kernel.has_value()) {
    doc["kernel"] = {
        {"kind", model.kernel->kind == KernelSpec::Kind::Linear ? "linear" : "gaussian"},
        {"sigma", model.kernel->sigma}};
    doc["train_x"] = matrix_to_json(model.train_x);
  }
  doc["preprocess"] = {{"means", vector_to_json(model.map.pre.means)},
                       {"scales", vector_to_json(model.map.pre.scales)}};
  doc["weights"] = matrix_to_json(model.map.weights);
  doc["loadings"] = matrix_to_json(model.map.loadings);
  doc["cox"] = {{"beta", vector_to_json(model.cox.beta)},
                {"loglik", model.cox.loglik},
                {"loglik_null", model.cox.loglik_null},
                {"converged", model.cox.converged},
                {"monotone_likelihood", model.cox.monotone_likelihood},
                {"n_obs", model.cox.n_obs},
                {"n_events", model.cox.n_events},
                {"baseline",
                 {{"knots", model.cox.baseline_cumhaz.knots()},
                  {"values", model.cox.baseline_cumhaz.values()}}}};
  doc["training_lp"] = vector_to_json(model.training_lp);
  return doc.dump(2);
}

FittedSurvivalModel deserialize_model(const std::string& text) {
  json doc = json::parse(text);
  if (doc.value("format", "") != "survpls-model") {
    throw InvalidInputError("deserialize_model: not a survpls model document");
  }
  FittedSurvivalModel model;
  model.method = method_from_name(doc.at("method").get<std::string>());
  model.n_components = doc.at("n_components").get<int>();
  if (doc.contains("eta")) model.eta = doc["eta"].get<double>();
  if (doc.contains("kernel")) {
    KernelSpec spec;
    spec.kind = doc["kernel"].at("kind").get<std::string>() == "linear"
                    ? KernelSpec::Kind::Linear
                    : KernelSpec::Kind::Gaussian;
    spec.sigma = doc["kernel"].at("sigma").get<double>();
    model.kernel = spec;
    model.train_x = matrix_from_json(doc.at("train_x"));
  }
  model.map.pre.means = vector_from_json(doc.at("preprocess").at("means"));
  model.map.pre.scales = vector_from_json(doc.at("preprocess").at("scales"));
  model.map.weights = matrix_from_json(doc.at("weights"), 0);
  model.map.loadings = matrix_from_json(doc.at("loadings"), 0);
  const json& cox = doc.at("cox");
  model.cox.beta = vector_from_json(cox.at("beta"));
  model.cox.loglik = cox.at("loglik").get<double>();
  model.cox.loglik_null = cox.at("loglik_null").get<double>();
  model.cox.converged = cox.at("converged").get<bool>();
  model.cox.monotone_likelihood = cox.at("monotone_likelihood").get<bool>();
  model.cox.n_obs = cox.at("n_obs").get<Eigen::Index>();
  model.cox.n_events = cox.at("n_events").get<Eigen::Index>();
  model.cox.baseline_cumhaz =
      StepFunction(cox.at("baseline").at("knots").get<std::vector<double>>(),
                   cox.at("baseline").at("values").get<std::vector<double>>(), 0.0);
  model.training_lp = vector_from_json(doc.at("training_lp"));
  return model;
}

}  // namespace survpls
