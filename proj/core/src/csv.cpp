#include "survpls/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "survpls/errors.hpp"

namespace survpls {

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s.empty() || s == "NA") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void write_dataset_csv(const SurvivalDataset& data, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidInputError("cannot open for writing: " + path);
  f << "id,time,status";
  for (Eigen::Index j = 0; j < data.p(); ++j) f << ",g" << (j + 1);
  f << "\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    f << (data.ids.empty() ? "s" + std::to_string(i + 1) : data.ids[static_cast<std::size_t>(i)]);
    f << "," << format_double(data.times[i]) << "," << data.status[i];
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      f << ",";
      if (!std::isnan(data.covariates(i, j))) f << format_double(data.covariates(i, j));
    }
    f << "\n";
  }
  if (!f) throw InvalidInputError("write failed: " + path);
}

SurvivalDataset read_dataset_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInputError("cannot open: " + path);
  std::string line;
  if (!std::getline(f, line)) throw InvalidInputError("empty dataset file: " + path);
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "time" || header[2] != "status") {
    throw InvalidInputError("dataset header must start with id,time,status: " + path);
  }
  const Eigen::Index p = static_cast<Eigen::Index>(header.size()) - 3;

  std::vector<std::string> ids;
  std::vector<double> times;
  std::vector<int> status;
  std::vector<double> cells;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> parts = split_csv_line(line);
    if (static_cast<Eigen::Index>(parts.size()) != p + 3) {
      throw InvalidInputError("dataset row with wrong column count: " + path);
    }
    ids.push_back(parts[0]);
    times.push_back(parse_double(parts[1]));
    status.push_back(std::stoi(parts[2]));
    for (Eigen::Index j = 0; j < p; ++j) {
      cells.push_back(parse_double(parts[static_cast<std::size_t>(3 + j)]));
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(times.size());
  SurvivalDataset data;
  data.times = Eigen::Map<Eigen::VectorXd>(times.data(), n);
  data.status.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) data.status[i] = status[static_cast<std::size_t>(i)];
  data.covariates.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      data.covariates(i, j) = cells[static_cast<std::size_t>(i * p + j)];
    }
  }
  data.ids = std::move(ids);
  data.validate();
  return data;
}

void write_sim_metadata(const SimulatedDataset& sim, const std::string& path) {
  nlohmann::json doc;
  doc["sim_type"] = sim_type_name(sim.config.sim_type);
  doc["link"] = link_type_name(sim.config.link);
  doc["n"] = sim.config.n;
  doc["p"] = sim.config.p;
  doc["censor_target"] = sim.config.censor_target;
  doc["link_strength"] = sim.config.link_strength;
  doc["seed"] = sim.config.seed;
  doc["relevant"] = sim.relevant;
  doc["labels"] = sim.labels;
  doc["theta"] = sim.theta;
  doc["realized_censoring"] = sim.realized_censoring;
  doc["true_lp"] = std::vector<double>(sim.true_lp.data(), sim.true_lp.data() + sim.true_lp.size());
  std::ofstream f(path);
  if (!f) throw InvalidInputError("cannot open for writing: " + path);
  f << doc.dump(2) << "\n";
}

}  // namespace survpls
