#pragma once

#include <string>
#include <vector>

#include "survpls/data.hpp"
#include "survpls/simulate.hpp"

namespace survpls {

/// Shortest round-trip decimal form of a double; NaN becomes "NA".
std::string format_double(double v);
double parse_double(const std::string& s);

std::vector<std::string> split_csv_line(const std::string& line);

/// Dataset CSV: header id,time,status,g1..gp; missing cells are empty.
void write_dataset_csv(const SurvivalDataset& data, const std::string& path);
SurvivalDataset read_dataset_csv(const std::string& path);

/// Sidecar metadata for simulated datasets (config, ground truth).
void write_sim_metadata(const SimulatedDataset& sim, const std::string& path);

}  // namespace survpls
