#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "extprop/estimators.hpp"
#include "extprop/experiments.hpp"
#include "extprop/synthesis.hpp"

namespace extprop {

// Declarative run description, stored as JSON:
//
//   {
//     "sensors": 18,
//     "spacing_ratio": 0.5,
//     "sources": { "angles_deg": [10, 21, 45], "powers": [1, 1, 1] },
//     "snr_db": 5,
//     "snapshots": 200,
//     "trials": 50,
//     "seed": 1,
//     "grid": { "start": -90, "stop": 90, "step": 0.1 }
//   }
//
// sensors, sources.angles_deg, snr_db and snapshots are required; the rest
// default as in the struct below. Unknown keys are rejected.
struct RunConfig {
  int sensors = 0;
  double spacing_ratio = 0.5;
  std::vector<double> angles_deg;
  std::vector<double> powers;  // empty: all sources at 1 W
  double snr_db = 0.0;
  int snapshots = 0;
  int trials = 1;
  std::uint64_t seed = 0;
  ScanGrid grid;

  ArrayConfig array() const;
  Scenario scenario() const;
  ExperimentPlan plan(std::vector<MethodId> methods) const;

  // Re-runs every module-level check; throws an Error subclass.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&);
};

// Throws UsageError for malformed JSON, missing or unknown keys, wrong
// types; module validation errors propagate unchanged.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_json_text(const RunConfig& config);

// Writers. Doubles are printed with 17 significant digits.
void write_spectrum_csv(std::ostream& os, const AngularSpectrum& spectrum);
void write_rmse_csv(std::ostream& os, const RmseCurve& curve);
void write_correlation_csv(std::ostream& os, const CorrelationMatrix& matrix);

struct RunMetadata {
  std::string command;
  std::vector<std::string> methods;
  RunConfig config;
  int trials_used = 0;
  int trials_failed = 0;
  std::vector<double> snr_grid_db;
};
std::string metadata_json(const RunMetadata& meta);

}  // namespace extprop
