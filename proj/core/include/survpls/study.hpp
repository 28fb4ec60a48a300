#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "survpls/cv.hpp"
#include "survpls/data.hpp"
#include "survpls/simulate.hpp"

namespace survpls {

inline constexpr const char* kVersion = "0.1.0";

enum class Measure {
  R2Nag,
  R2XO,
  R2OXS,
  IR2BSw,
  IRSSw,
  IaucCD,
  IaucSH,
  IaucUno,
  IaucSurvROC,
  HarrellC,
  GHCI,
  UnoC,
  IBSw,
  IBSunw,
  ISSw,
  ISSunw,
};

std::string measure_name(Measure m);
Measure measure_from_name(const std::string& name);

struct StudyConfig {
  int replicates = 20;
  std::vector<SimType> sims = {SimType::Eigengene, SimType::Cluster, SimType::Factorial};
  std::vector<LinkType> links = {LinkType::None, LinkType::Linear};
  std::vector<Method> methods = {Method::Plsdr, Method::SPlsdr, Method::PlsCox};
  std::vector<Criterion> criteria = {Criterion::Cvll,    Criterion::VhCvll,
                                     Criterion::IaucSH,  Criterion::IaucUno,
                                     Criterion::IaucSurvROC, Criterion::IBSw,
                                     Criterion::ISSw};
  std::vector<Measure> measures = {Measure::R2Nag,   Measure::R2XO,    Measure::R2OXS,
                                   Measure::GHCI,    Measure::HarrellC, Measure::UnoC,
                                   Measure::IaucCD,  Measure::IaucSH,  Measure::IaucUno,
                                   Measure::IaucSurvROC, Measure::IBSw, Measure::ISSw,
                                   Measure::IR2BSw,  Measure::IRSSw};
  int n = 100;
  int p = 200;
  double censor_target = 0.4;
  double link_strength = kDefaultLinkStrength;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir = "study-out";
  int max_components = 6;
  std::vector<double> eta_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int folds = 7;
  double train_fraction = 0.7;
  KernelSpec kernel = KernelSpec::gaussian(0.0);  // used by the DK methods

  void validate() const;
};

/// One long-format result cell value.
struct StudyRecord {
  int replicate = 0;
  SimType sim = SimType::Eigengene;
  LinkType link = LinkType::None;
  Method method = Method::Plsdr;
  Criterion criterion = Criterion::VhCvll;
  Measure measure = Measure::IaucCD;
  int selected_m = 0;
  double selected_eta = std::numeric_limits<double>::quiet_NaN();  // NaN = none
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string flags;
};

struct StudyResult {
  std::vector<StudyRecord> records;
  std::uint64_t seed = 0;
  std::string version = kVersion;
};

/// Per replicate: simulate, split 7:3, per (method, criterion) CV-select on
/// the training part, refit, evaluate every measure on the test part.
/// Failing cells are recorded with a flag; the run never aborts. The result
/// is bit-identical for a given config and seed regardless of `jobs`.
StudyResult run_study(const StudyConfig& config);

void write_results_csv(const StudyResult& result, const std::string& path);
StudyResult read_results_csv(const std::string& path);

/// results.csv, summary.csv, deltas.csv, component_counts.csv and boxplot
/// SVGs under `out_dir` (created if missing).
void emit_report(const StudyResult& result, const std::string& out_dir);

/// Declarative JSON config document (the CLI's --config format).
StudyConfig parse_study_config(const std::string& json_text);
std::string study_config_to_json(const StudyConfig& config);

}  // namespace survpls
