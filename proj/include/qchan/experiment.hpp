#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qchan/channel.hpp"

namespace qchan {

// Numeric axis of a parameter grid: either explicit values or start/stop/step.
struct GridRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  std::vector<double> explicit_values;
  bool has_explicit = false;

  static GridRange from_json(const nlohmann::json& j);
  static GridRange from_values(std::vector<double> v);
  std::vector<double> values() const;  // throws RangeInvalid on bad ranges
};

struct ExperimentConfig {
  std::string kind;  // capacity_verify | additivity | minent | pnorm | sweep |
                     // ppt_scan | classical_reduce
  std::optional<FamilySpec> family;  // single channel, or ...
  nlohmann::json grid;               // ... a family-specific grid object
  std::size_t starts = 20;
  std::uint64_t seed = 0;
  double verify_tol = 1e-9;
  double p = 2.0;  // exponent for pnorm runs
  std::size_t max_iter = 2000;
  std::string output;  // CSV path; empty = don't write

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
};

// One CSV row, keys in column order. Every row carries seed and version.
using ResultRow = std::vector<std::pair<std::string, std::string>>;

struct RunOutcome {
  std::vector<ResultRow> rows;
  nlohmann::json certificates;  // array; filled for capacity_verify/additivity
  bool ok = true;               // all rows verified and all ascents converged
  std::string csv_path;         // where rows went, empty if not written
};

// Cartesian expansion of the config's grid (or the single family), in
// lexicographic axis order, after constraint filtering.
std::vector<FamilySpec> expand_grid(const ExperimentConfig& config);

// Runs the experiment, writes CSV (and a ".certs.json" sidecar for the
// verifying kinds) next to config.output. Honors QCHAN_SEED / QCHAN_THREADS.
RunOutcome run_experiment(const ExperimentConfig& config);

// Re-runs the config and checks the freshly computed certificates against the
// sidecar stored by a previous run. True when everything matches exactly.
bool verify_stored(const ExperimentConfig& config);

std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

void write_csv(const std::string& path, const std::vector<ResultRow>& rows);

}  // namespace qchan
