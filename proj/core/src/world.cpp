#include "swarmcso/world.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "swarmcso/errors.hpp"
#include "swarmcso/measurement.hpp"

namespace swarmcso {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(n_agents >= 0, "n_agents", "must be non-negative");
  require(n_targets >= 0, "n_targets", "must be non-negative");
  require(n_steps >= 1, "n_steps", "must be at least 1");
  require(dt > 0.0, "dt", "must be positive");
  for (int i = 0; i < 6; ++i) require(q_diag[i] >= 0.0, "q_diag", "entries must be non-negative");
  require(sigma_r > 0.0, "sigma_r", "must be positive");
  require(sigma_phi > 0.0, "sigma_phi", "must be positive");
  require(sigma_theta > 0.0, "sigma_theta", "must be positive");
  require(detect_scale > 0.0, "detect_scale", "must be positive");
  require(comm_divisor > 0.0, "comm_divisor", "must be positive");
  require(comm_divisor_alt > 0.0, "comm_divisor_alt", "must be positive");
  require(heading_step > 0.0, "heading_step", "must be positive");
  require(vertical_step > 0.0, "vertical_step", "must be positive");
  require(seesaw_iters >= 1, "seesaw_iters", "must be at least 1");
  require(agent_speed > 0.0, "agent_speed", "must be positive");
  require(target_step >= 0.0, "target_step", "must be non-negative");
  require(target_vert_range >= 0.0, "target_vert_range", "must be non-negative");
  require(init_cube_halfwidth > 0.0, "init_cube_halfwidth", "must be positive");
  if (!group_sizes.empty()) {
    int total = 0;
    for (int g : group_sizes) {
      require(g >= 1, "group_sizes", "every group must have at least one agent");
      total += g;
    }
    require(total == n_agents, "group_sizes", "sizes must sum to n_agents");
  }
}

std::vector<std::vector<int>> ScenarioConfig::groups() const {
  std::vector<std::vector<int>> out;
  if (group_sizes.empty()) {
    std::vector<int> all(static_cast<std::size_t>(n_agents));
    std::iota(all.begin(), all.end(), 0);
    if (!all.empty()) out.push_back(std::move(all));
    return out;
  }
  int next = 0;
  for (int size : group_sizes) {
    std::vector<int> members(static_cast<std::size_t>(size));
    std::iota(members.begin(), members.end(), next);
    next += size;
    out.push_back(std::move(members));
  }
  return out;
}

std::pair<std::vector<TargetTruth>, std::vector<AgentTruth>> init_scenario(
    const ScenarioConfig& cfg, Rng& rng) {
  const double hw = cfg.init_cube_halfwidth;
  std::vector<TargetTruth> targets(static_cast<std::size_t>(cfg.n_targets));
  for (auto& t : targets) {
    t.pos = {rng.uniform(-hw, hw), rng.uniform(-hw, hw), rng.uniform(-hw, hw)};
  }
  const auto grouping = cfg.groups();
  std::vector<int> group_of(static_cast<std::size_t>(cfg.n_agents), 0);
  for (std::size_t g = 0; g < grouping.size(); ++g) {
    for (int member : grouping[g]) group_of[static_cast<std::size_t>(member)] = static_cast<int>(g);
  }
  std::vector<AgentTruth> agents(static_cast<std::size_t>(cfg.n_agents));
  for (std::size_t j = 0; j < agents.size(); ++j) {
    agents[j].pos = {rng.uniform(-hw, hw), rng.uniform(-hw, hw), rng.uniform(-hw, hw)};
    agents[j].gamma = rng.uniform(0.0, 2.0 * M_PI);
    agents[j].group = group_of[j];
  }
  return {std::move(targets), std::move(agents)};
}

TargetTruth step_target(const TargetTruth& t, const ScenarioConfig& cfg, Rng& rng) {
  const double heading = rng.uniform(0.0, 2.0 * M_PI);
  const double dv = rng.uniform(-cfg.target_vert_range, cfg.target_vert_range);
  TargetTruth out;
  out.pos = {t.pos.e + cfg.target_step * std::cos(heading),
             t.pos.n + cfg.target_step * std::sin(heading), t.pos.u + dv};
  return out;
}

AgentTruth step_agent(const AgentTruth& a, const ActionVector& action, const ScenarioConfig& cfg) {
  AgentTruth out = a;
  out.pos = post_action_position(a.pos, action, cfg.agent_speed);
  out.gamma = wrap_angle(action.gamma);
  return out;
}

bool draw_detection(const EnuVector& agent_pos, const EnuVector& target_pos,
                    const ScenarioConfig& cfg, Rng& rng) {
  return rng.bernoulli(predicted_detection_prob(target_pos - agent_pos, cfg.detect_scale));
}

bool draw_communication(const EnuVector& pos_j, const EnuVector& pos_l, double divisor, Rng& rng) {
  return rng.bernoulli(std::exp(-(pos_j - pos_l).squared_norm() / divisor));
}

}  // namespace swarmcso
