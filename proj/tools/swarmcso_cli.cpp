#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "swarmcso/config_io.hpp"
#include "swarmcso/presets.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decentralized multi-target tracking swarm simulator"};

  std::string config_path;
  std::string preset_name;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int reps = 0;
  int steps = 0;
  int parallel = static_cast<int>(std::thread::hardware_concurrency());
  bool log_raw = false;
  bool list_presets = false;

  app.add_option("--config", config_path, "JSON scenario config file");
  app.add_option("--preset", preset_name, "named experiment preset");
  app.add_option("--seed", seed, "base RNG seed (replication r uses seed + r)");
  app.add_option("--reps", reps, "number of replications (0: preset default)");
  app.add_option("--steps", steps, "override step count (0: preset/config value)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--parallel", parallel, "worker threads for replications");
  app.add_flag("--log-raw", log_raw, "keep full per-step logs in memory");
  app.add_flag("--list-presets", list_presets, "list preset names and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_presets) {
      for (const auto& p : swarmcso::experiment_presets()) {
        std::cout << p.name << " (" << p.variants.size() << " variant"
                  << (p.variants.size() == 1 ? "" : "s") << ", default reps " << p.default_reps
                  << ")\n";
      }
      return 0;
    }
    if (config_path.empty() == preset_name.empty()) {
      std::cerr << "error: give exactly one of --config or --preset\n";
      return 1;
    }

    swarmcso::RunOverrides overrides;
    overrides.seed = seed;
    overrides.reps = reps;
    overrides.steps = steps;
    overrides.parallelism = parallel > 0 ? parallel : 1;
    overrides.log_raw = log_raw;

    swarmcso::PresetOutput output;
    if (!preset_name.empty()) {
      output = swarmcso::run_preset(preset_name, overrides, out_dir);
    } else {
      swarmcso::ScenarioConfig cfg = swarmcso::parse_config(config_path);
      output = swarmcso::run_scenario(cfg, overrides, out_dir);
    }
    if (!output.trajectories_path.empty()) std::cout << output.trajectories_path << '\n';
    std::cout << output.metrics_path << '\n' << output.summary_path << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
