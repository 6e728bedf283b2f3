#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "swarmcso/decision.hpp"
#include "swarmcso/world.hpp"

namespace swarmcso {

/// Per-step record: distance from each target to its closest agent, per-agent
/// processing wall-clock (the APT component), and per-agent per-target
/// log-determinant of the post-update Fisher information (raw logging only).
struct StepMetrics {
  int k = 0;
  std::vector<double> target_min_dist;
  std::vector<double> agent_proc_seconds;
  std::vector<std::vector<double>> fim_logdet;
};

struct RunOptions {
  bool log_raw = false;               // keep full StepMetrics series
  bool record_trajectories = false;   // keep per-step entity positions
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> min_dist;  // [step][target]
  double total_seconds = 0.0;                 // ST
  double mean_agent_proc_seconds = 0.0;       // APT
  std::vector<StepMetrics> raw;
  std::vector<std::vector<EnuVector>> agent_traj;   // [agent][step]
  std::vector<std::vector<EnuVector>> target_traj;  // [target][step]
  std::vector<TargetTruth> final_targets;
  std::vector<AgentTruth> final_agents;
  std::vector<std::vector<std::optional<TrackEstimate>>> final_tracks;  // [agent][target]
};

/// Mutable per-agent state owned by the simulation loop.
struct AgentRuntime {
  AgentTruth truth;
  ActionVector last_action;
  std::vector<std::optional<TrackEstimate>> tracks;     // updated stage (k|k)
  std::vector<std::optional<TrackEstimate>> predicted;  // this step's (k|k-1), scratch
  std::vector<std::optional<SimulatedTrueState>> sim_states;  // this step's draws, scratch
  FisherView view;
};

/// One replication of the perception-action cycle. Per step, in order: EKF time
/// prediction, sensing draws, directional communication draws and snapshot
/// delivery, measurement updates, the per-group seesaw decide, agent moves, and
/// finally target moves. Exposed as a class so tests can drive and inspect
/// single steps.
class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed);

  StepMetrics step();

  int current_step() const { return step_index_; }
  const std::vector<TargetTruth>& targets() const { return targets_; }
  const std::vector<AgentRuntime>& agents() const { return agents_; }
  const ScenarioConfig& config() const { return cfg_; }

 private:
  void sense();
  void communicate();
  void infer();
  void decide_all(StepMetrics& metrics);

  ScenarioConfig cfg_;
  MotionModel model_;
  NoiseModel noise_;
  Rng rng_;
  int step_index_ = 0;

  std::vector<TargetTruth> targets_;
  std::vector<AgentRuntime> agents_;
  std::vector<std::vector<int>> groups_;

  // per-step scratch
  std::vector<std::vector<bool>> detected_;       // [agent][target]
  std::vector<std::vector<Measurement>> meas_;    // [agent][target], valid where detected
  std::vector<std::vector<bool>> link_;           // [sender][receiver], this step
  std::vector<ActionVector> decided_actions_;     // [agent]
  std::vector<double> proc_seconds_;              // [agent]
};

ReplicationResult run_replication(const ScenarioConfig& cfg, std::uint64_t seed,
                                  const RunOptions& options = {});

/// Replication r uses seed base_seed + r. Results are indexed by replication and
/// independent of the parallelism degree. Trajectories, when requested, are
/// recorded for replication 0 only.
std::vector<ReplicationResult> run_replications(const ScenarioConfig& cfg, int n_reps,
                                                std::uint64_t base_seed, int parallelism,
                                                const RunOptions& options = {});

/// m_k series: at each step, the median min-distance over the pooled
/// (replication x target) samples (or the configured alternative).
std::vector<double> median_min_distance(const std::vector<ReplicationResult>& results,
                                        MedianMode mode = MedianMode::pooled);

}  // namespace swarmcso
