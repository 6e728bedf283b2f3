#pragma once

#include <string>
#include <vector>

#include "swarmcso/engine.hpp"

namespace swarmcso {

/// One named study: scenario variants run with shared seeds and emitted side by side.
struct PresetVariant {
  std::string label;
  ScenarioConfig cfg;
};

struct ExperimentPreset {
  std::string name;
  int default_reps = 1;
  bool timing_table = false;  // emits (A, T, mean ST, mean APT) rows instead of m_k series
  std::vector<PresetVariant> variants;
};

const std::vector<ExperimentPreset>& experiment_presets();
const ExperimentPreset& find_preset(const std::string& name);  // throws ConfigError

struct RunOverrides {
  std::uint64_t seed = 1;
  int reps = 0;        // 0: preset default
  int steps = 0;       // 0: preset default
  int parallelism = 1;
  bool log_raw = false;
};

struct PresetOutput {
  std::string trajectories_path;  // empty if not emitted
  std::string metrics_path;
  std::string summary_path;
};

/// Run a preset and write trajectories.csv, metrics.csv and summary.json into
/// out_dir. CSV output is byte-stable for a fixed seed.
PresetOutput run_preset(const std::string& name, const RunOverrides& overrides,
                        const std::string& out_dir);

/// Run a single custom scenario (label "custom") with the same outputs.
PresetOutput run_scenario(const ScenarioConfig& cfg, const RunOverrides& overrides,
                          const std::string& out_dir);

}  // namespace swarmcso
