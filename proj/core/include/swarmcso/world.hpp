#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "swarmcso/decision.hpp"
#include "swarmcso/ekf2.hpp"
#include "swarmcso/information.hpp"
#include "swarmcso/rng.hpp"
#include "swarmcso/types.hpp"

namespace swarmcso {

struct TargetTruth {
  EnuVector pos;
};

struct AgentTruth {
  EnuVector pos;
  double gamma = 0.0;
  int group = 0;
};

enum class MedianMode {
  pooled,                // median over (replication x target) pooled samples
  per_replication_mean,  // median over replications of the per-replication target mean
};

/// All scenario constants. Defaults match the simulation studies' parameters.
struct ScenarioConfig {
  int n_agents = 2;
  int n_targets = 2;
  std::vector<int> group_sizes;  // empty: one group of all agents
  int n_steps = 4000;
  double dt = 0.1;
  Vec6 q_diag = (Vec6() << 0.03, 0.03, 0.03, 0.01, 0.01, 0.01).finished();
  double sigma_r = 0.01;
  double sigma_phi = 0.01;
  double sigma_theta = 0.01;
  double detect_scale = 100.0;
  double comm_divisor = 200.0;
  double comm_divisor_alt = 2000.0;  // the more-reliable-communication variant
  double heading_step = 1.0;         // a_k
  double vertical_step = 0.1;        // b_k
  int seesaw_iters = 2;
  double agent_speed = 1.0;
  double target_step = 0.1;
  double target_vert_range = 0.15;
  double init_cube_halfwidth = 4.0;
  std::uint64_t seed = 1;
  bool determinant_form_gradient = false;
  MedianMode median_mode = MedianMode::pooled;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  /// Agent indices per group (consecutive blocks of group_sizes).
  std::vector<std::vector<int>> groups() const;
  MotionModel motion_model() const { return MotionModel::constant_velocity(dt, q_diag); }
  NoiseModel noise_model() const {
    return NoiseModel::from_sigmas(sigma_r, sigma_phi, sigma_theta);
  }
  GradientStepConfig gradient_config() const {
    return {heading_step, vertical_step, seesaw_iters, agent_speed, determinant_form_gradient};
  }
};

/// Agents and targets drawn uniformly inside the init cube; headings uniform on [0, 2pi).
std::pair<std::vector<TargetTruth>, std::vector<AgentTruth>> init_scenario(
    const ScenarioConfig& cfg, Rng& rng);

/// Brownian-like target motion: random heading, fixed-length horizontal step,
/// uniform vertical displacement.
TargetTruth step_target(const TargetTruth& t, const ScenarioConfig& cfg, Rng& rng);

/// Execute an action: one horizontal step along the heading, vertical set to y_u.
AgentTruth step_agent(const AgentTruth& a, const ActionVector& action, const ScenarioConfig& cfg);

/// Bernoulli detection with p = exp(-d^2 / detect_scale).
bool draw_detection(const EnuVector& agent_pos, const EnuVector& target_pos,
                    const ScenarioConfig& cfg, Rng& rng);

/// Bernoulli directional link with p = exp(-d^2 / divisor).
bool draw_communication(const EnuVector& pos_j, const EnuVector& pos_l, double divisor, Rng& rng);

}  // namespace swarmcso
