#include "swarmcso/presets.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "swarmcso/config_io.hpp"
#include "swarmcso/errors.hpp"

namespace swarmcso {

namespace {

using nlohmann::json;

ScenarioConfig scenario(int agents, int targets, int steps, std::vector<int> groups = {}) {
  ScenarioConfig cfg;
  cfg.n_agents = agents;
  cfg.n_targets = targets;
  cfg.n_steps = steps;
  cfg.group_sizes = std::move(groups);
  return cfg;
}

std::vector<ExperimentPreset> make_presets() {
  std::vector<ExperimentPreset> out;

  out.push_back({"fig-2a2t", 1, false, {{"a2t2", scenario(2, 2, 1500)}}});
  out.push_back({"fig-3a2t", 1, false, {{"a3t2", scenario(3, 2, 2000)}}});
  out.push_back({"groups-2x2", 1, false, {{"g2x2", scenario(4, 2, 1500, {2, 2})}}});
  out.push_back({"groups-2x4", 1, false, {{"g2x4", scenario(8, 4, 1500, {4, 4})}}});

  out.push_back({"median-T2",
                 100,
                 false,
                 {{"a2", scenario(2, 2, 4000)},
                  {"a5", scenario(5, 2, 4000)},
                  {"a10", scenario(10, 2, 4000)},
                  {"g5x2", scenario(10, 2, 4000, {2, 2, 2, 2, 2})}}});
  out.push_back(
      {"median-T4-8x4", 100, false, {{"g8x4", scenario(32, 4, 4000, {4, 4, 4, 4, 4, 4, 4, 4})}}});

  ExperimentPreset timing{"timing-table", 10, true, {}};
  for (int a : {2, 5, 10, 15, 20, 25}) {
    timing.variants.push_back(
        {"a" + std::to_string(a) + "t2", scenario(a, 2, 4000)});
  }
  for (int t : {3, 4, 5, 10, 15}) {
    timing.variants.push_back({"a5t" + std::to_string(t), scenario(5, t, 4000)});
  }
  out.push_back(std::move(timing));

  ExperimentPreset comm{"commcompare", 100, false, {}};
  {
    ScenarioConfig base = scenario(2, 2, 4000);
    PresetVariant v200{"div200", base};
    PresetVariant v2000{"div2000", base};
    v2000.cfg.comm_divisor = v2000.cfg.comm_divisor_alt;
    comm.variants = {v200, v2000};
  }
  out.push_back(std::move(comm));
  return out;
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct VariantResult {
  const PresetVariant* variant = nullptr;
  std::vector<ReplicationResult> reps;
  std::vector<double> m_k;
  double mean_st = 0.0;
  double mean_apt = 0.0;
};

void write_trajectories(const std::string& path, const ReplicationResult& rep) {
  std::ofstream out(path, std::ios::binary);
  out << "k,id,kind,e,n,u\n";
  const std::size_t n_steps = rep.target_traj.empty()
                                  ? (rep.agent_traj.empty() ? 0 : rep.agent_traj[0].size())
                                  : rep.target_traj[0].size();
  for (std::size_t k = 0; k < n_steps; ++k) {
    for (std::size_t i = 0; i < rep.target_traj.size(); ++i) {
      const EnuVector& p = rep.target_traj[i][k];
      out << (k + 1) << ',' << i << ",target," << fmt9(p.e) << ',' << fmt9(p.n) << ','
          << fmt9(p.u) << '\n';
    }
    for (std::size_t j = 0; j < rep.agent_traj.size(); ++j) {
      const EnuVector& p = rep.agent_traj[j][k];
      out << (k + 1) << ',' << j << ",agent," << fmt9(p.e) << ',' << fmt9(p.n) << ','
          << fmt9(p.u) << '\n';
    }
  }
}

void write_metric_series(const std::string& path, const std::vector<VariantResult>& variants) {
  std::ofstream out(path, std::ios::binary);
  out << "k";
  for (const auto& v : variants) out << ",m_" << v.variant->label;
  out << '\n';
  const std::size_t n_steps = variants.empty() ? 0 : variants[0].m_k.size();
  for (std::size_t k = 0; k < n_steps; ++k) {
    out << (k + 1);
    for (const auto& v : variants) out << ',' << fmt9(v.m_k[k]);
    out << '\n';
  }
}

void write_timing_table(const std::string& path, const std::vector<VariantResult>& variants) {
  std::ofstream out(path, std::ios::binary);
  out << "A,T,mean_st_seconds,mean_apt_seconds\n";
  for (const auto& v : variants) {
    out << v.variant->cfg.n_agents << ',' << v.variant->cfg.n_targets << ',' << fmt9(v.mean_st)
        << ',' << fmt9(v.mean_apt) << '\n';
  }
}

PresetOutput run_variants(const ExperimentPreset& preset, const RunOverrides& overrides,
                          const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const int reps = overrides.reps > 0 ? overrides.reps : preset.default_reps;

  std::vector<VariantResult> results;
  results.reserve(preset.variants.size());
  for (std::size_t vi = 0; vi < preset.variants.size(); ++vi) {
    const PresetVariant& variant = preset.variants[vi];
    ScenarioConfig cfg = variant.cfg;
    if (overrides.steps > 0) cfg.n_steps = overrides.steps;
    cfg.seed = overrides.seed;

    RunOptions opts;
    opts.log_raw = overrides.log_raw;
    opts.record_trajectories = !preset.timing_table && vi == 0;

    VariantResult vr;
    vr.variant = &variant;
    vr.reps = run_replications(cfg, reps, overrides.seed, overrides.parallelism, opts);
    if (!preset.timing_table) vr.m_k = median_min_distance(vr.reps, cfg.median_mode);
    for (const auto& rep : vr.reps) {
      vr.mean_st += rep.total_seconds;
      vr.mean_apt += rep.mean_agent_proc_seconds;
    }
    vr.mean_st /= static_cast<double>(reps);
    vr.mean_apt /= static_cast<double>(reps);
    results.push_back(std::move(vr));
  }

  PresetOutput output;
  const std::filesystem::path dir(out_dir);
  output.metrics_path = (dir / "metrics.csv").string();
  output.summary_path = (dir / "summary.json").string();

  if (preset.timing_table) {
    write_timing_table(output.metrics_path, results);
  } else {
    write_metric_series(output.metrics_path, results);
    output.trajectories_path = (dir / "trajectories.csv").string();
    write_trajectories(output.trajectories_path, results[0].reps[0]);
  }

  json summary;
  summary["preset"] = preset.name;
  summary["seed"] = overrides.seed;
  summary["reps"] = reps;
  summary["parallelism"] = overrides.parallelism;
  json jvars = json::array();
  for (const auto& vr : results) {
    json jv;
    jv["label"] = vr.variant->label;
    ScenarioConfig echoed = vr.variant->cfg;
    if (overrides.steps > 0) echoed.n_steps = overrides.steps;
    echoed.seed = overrides.seed;
    jv["config"] = json::parse(config_to_json(echoed));
    jv["mean_st_seconds"] = vr.mean_st;
    jv["mean_apt_seconds"] = vr.mean_apt;
    json seeds = json::array();
    for (const auto& rep : vr.reps) seeds.push_back(rep.seed);
    jv["replication_seeds"] = seeds;
    jvars.push_back(std::move(jv));
  }
  summary["variants"] = std::move(jvars);
  std::ofstream sout(output.summary_path, std::ios::binary);
  sout << summary.dump(2) << '\n';
  return output;
}

}  // namespace

const std::vector<ExperimentPreset>& experiment_presets() {
  static const std::vector<ExperimentPreset> presets = make_presets();
  return presets;
}

const ExperimentPreset& find_preset(const std::string& name) {
  for (const auto& p : experiment_presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset: " + name);
}

PresetOutput run_preset(const std::string& name, const RunOverrides& overrides,
                        const std::string& out_dir) {
  return run_variants(find_preset(name), overrides, out_dir);
}

PresetOutput run_scenario(const ScenarioConfig& cfg, const RunOverrides& overrides,
                          const std::string& out_dir) {
  ExperimentPreset preset{"custom", 1, false, {{"custom", cfg}}};
  return run_variants(preset, overrides, out_dir);
}

}  // namespace swarmcso
