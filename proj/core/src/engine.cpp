#include "swarmcso/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "swarmcso/errors.hpp"
#include "swarmcso/linalg.hpp"
#include "swarmcso/measurement.hpp"

namespace swarmcso {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

TrackEstimate init_track_from_measurement(const Measurement& z, const EnuVector& agent_pos) {
  const double st = std::sin(z.theta);
  const Vec3 dir(std::cos(z.phi) * st, std::sin(z.phi) * st, std::cos(z.theta));
  TrackEstimate t;
  t.x = Vec6::Zero();
  t.x.head<3>() = agent_pos.vec() + z.r * dir;
  t.p = Mat66::Identity();
  t.stage = Stage::updated;
  return t;
}

double median_of(std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      model_(cfg.motion_model()),
      noise_(cfg.noise_model()),
      rng_(seed) {
  cfg_.validate();
  cfg_.seed = seed;
  auto [targets, truths] = init_scenario(cfg_, rng_);
  targets_ = std::move(targets);
  groups_ = cfg_.groups();

  const auto a = static_cast<std::size_t>(cfg_.n_agents);
  const auto t = static_cast<std::size_t>(cfg_.n_targets);
  agents_.resize(a);
  for (std::size_t j = 0; j < a; ++j) {
    agents_[j].truth = truths[j];
    agents_[j].last_action = {truths[j].gamma, truths[j].pos.u};
    agents_[j].tracks.assign(t, std::nullopt);
    agents_[j].predicted.assign(t, std::nullopt);
    agents_[j].sim_states.assign(t, std::nullopt);
    agents_[j].view.own_fims.assign(t, std::nullopt);
    agents_[j].view.peers.assign(a, std::nullopt);
  }
  detected_.assign(a, std::vector<bool>(t, false));
  meas_.assign(a, std::vector<Measurement>(t));
  link_.assign(a, std::vector<bool>(a, false));
  decided_actions_.assign(a, ActionVector{});
  proc_seconds_.assign(a, 0.0);
}

void Simulation::sense() {
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      bool det = draw_detection(agents_[j].truth.pos, targets_[i].pos, cfg_, rng_);
      if (det) {
        const EnuVector rel = targets_[i].pos - agents_[j].truth.pos;
        if (rel.squared_norm() == 0.0) {
          det = false;  // coincident positions carry no usable measurement
        } else {
          Measurement z = measure(targets_[i].pos, agents_[j].truth.pos);
          z.r += cfg_.sigma_r * rng_.normal();
          z.phi = wrap_angle(z.phi + cfg_.sigma_phi * rng_.normal());
          z.theta += cfg_.sigma_theta * rng_.normal();
          meas_[j][i] = z;
        }
      }
      detected_[j][i] = det;
    }
  }
}

void Simulation::communicate() {
  for (auto& agent : agents_) {
    for (auto& snap : agent.view.peers) {
      if (snap) snap->fresh = false;
    }
  }
  for (auto& row : link_) std::fill(row.begin(), row.end(), false);

  for (const auto& group : groups_) {
    for (int sender : group) {
      for (int receiver : group) {
        if (receiver == sender) continue;
        const auto s = static_cast<std::size_t>(sender);
        const auto r = static_cast<std::size_t>(receiver);
        if (!draw_communication(agents_[s].truth.pos, agents_[r].truth.pos, cfg_.comm_divisor,
                                rng_)) {
          continue;
        }
        PeerSnapshot snap;
        snap.step = step_index_;
        snap.fresh = true;
        snap.pos = agents_[s].truth.pos;
        snap.gamma = agents_[s].truth.gamma;
        snap.last_action = agents_[s].last_action;
        snap.fims = agents_[s].view.own_fims;
        agents_[r].view.peers[s] = std::move(snap);
        link_[s][r] = true;
      }
    }
  }
}

void Simulation::infer() {
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    AgentRuntime& agent = agents_[j];
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      if (!agent.predicted[i]) {
        if (detected_[j][i]) {
          agent.tracks[i] = init_track_from_measurement(meas_[j][i], agent.truth.pos);
        }
        continue;
      }
      try {
        agent.tracks[i] =
            update(*agent.predicted[i], meas_[j][i], agent.truth.pos, noise_, detected_[j][i]);
      } catch (const SingularInnovation&) {
        agent.tracks[i] = TrackEstimate{agent.predicted[i]->x, agent.predicted[i]->p,
                                        Stage::updated};
      }
    }
    proc_seconds_[j] += seconds_since(t0);
  }
}

void Simulation::decide_all(StepMetrics& metrics) {
  const GradientStepConfig grad_cfg = cfg_.gradient_config();

  // One covariance-matched draw per (agent, target, step), reused across both
  // gradient components and every seesaw iteration.
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    AgentRuntime& agent = agents_[j];
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      if (agent.predicted[i] && agent.view.own_fims[i]) {
        agent.sim_states[i] = sample_simulated_true_state(*agent.predicted[i], rng_);
      } else {
        agent.sim_states[i] = std::nullopt;
      }
    }
    proc_seconds_[j] += seconds_since(t0);
  }

  for (std::size_t j = 0; j < agents_.size(); ++j) {
    decided_actions_[j] = {agents_[j].truth.gamma, agents_[j].truth.pos.u};
  }

  for (const auto& group : groups_) {
    std::vector<ActionVector> initial(group.size());
    for (std::size_t m = 0; m < group.size(); ++m) {
      initial[m] = decided_actions_[static_cast<std::size_t>(group[m])];
    }

    const ContextBuilder build = [&](int member, std::span<const ActionVector> candidates,
                                     const std::vector<bool>& decided) {
      const auto self = static_cast<std::size_t>(group[static_cast<std::size_t>(member)]);
      const AgentRuntime& agent = agents_[self];
      std::vector<std::optional<PeerPrediction>> preds(agents_.size());
      for (std::size_t m = 0; m < group.size(); ++m) {
        const auto peer = static_cast<std::size_t>(group[m]);
        if (peer == self) continue;
        const auto& snap = agent.view.peers[peer];
        if (!snap || !snap->fresh) continue;  // out of contact: no peer term
        if (decided[m]) {
          // the peer's just-decided action is visible over the live link
          preds[peer] = PeerPrediction{snap->pos, candidates[m]};
        } else {
          preds[peer] = predict_peer_action(snap);
        }
      }
      return build_decision_context(agent.view, preds, agent.sim_states, agent.truth.pos, noise_,
                                    cfg_.detect_scale, cfg_.agent_speed);
    };

    const ImproveFn improve = [&](int member, const DecisionContext& ctx,
                                  const ActionVector& cur) {
      const auto self = static_cast<std::size_t>(group[static_cast<std::size_t>(member)]);
      const auto t0 = Clock::now();
      const ActionVector next = decide(ctx, cur, grad_cfg);
      proc_seconds_[self] += seconds_since(t0);
      return next;
    };

    const std::vector<ActionVector> final_actions =
        seesaw_step(static_cast<int>(group.size()), build, initial, grad_cfg, improve);
    for (std::size_t m = 0; m < group.size(); ++m) {
      decided_actions_[static_cast<std::size_t>(group[m])] = final_actions[m];
    }
  }

  metrics.agent_proc_seconds = proc_seconds_;
}

StepMetrics Simulation::step() {
  ++step_index_;
  StepMetrics metrics;
  metrics.k = step_index_;
  std::fill(proc_seconds_.begin(), proc_seconds_.end(), 0.0);

  // time prediction; own pre-action Fisher for this step
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    AgentRuntime& agent = agents_[j];
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      agent.sim_states[i] = std::nullopt;
      if (!agent.tracks[i]) {
        agent.predicted[i] = std::nullopt;
        agent.view.own_fims[i] = std::nullopt;
        continue;
      }
      agent.predicted[i] = predict(*agent.tracks[i], model_);
      try {
        agent.view.own_fims[i] = fisher_contribution(*agent.predicted[i]);
      } catch (const SingularCovariance&) {
        agent.view.own_fims[i] = std::nullopt;
      }
    }
    proc_seconds_[j] += seconds_since(t0);
  }

  sense();
  communicate();
  infer();
  decide_all(metrics);

  for (std::size_t j = 0; j < agents_.size(); ++j) {
    agents_[j].truth = step_agent(agents_[j].truth, decided_actions_[j], cfg_);
    agents_[j].last_action = decided_actions_[j];
  }
  for (auto& target : targets_) target = step_target(target, cfg_, rng_);

  metrics.target_min_dist.resize(targets_.size());
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& agent : agents_) {
      const double d = distance(agent.truth.pos, targets_[i].pos);
      if (std::isnan(best) || d < best) best = d;
    }
    metrics.target_min_dist[i] = best;
  }
  return metrics;
}

ReplicationResult run_replication(const ScenarioConfig& cfg, std::uint64_t seed,
                                  const RunOptions& options) {
  Simulation sim(cfg, seed);
  ReplicationResult result;
  result.seed = seed;
  result.min_dist.reserve(static_cast<std::size_t>(cfg.n_steps));
  if (options.record_trajectories) {
    result.agent_traj.resize(static_cast<std::size_t>(cfg.n_agents));
    result.target_traj.resize(static_cast<std::size_t>(cfg.n_targets));
  }

  const auto t0 = Clock::now();
  double proc_total = 0.0;
  for (int k = 0; k < cfg.n_steps; ++k) {
    StepMetrics metrics = sim.step();
    for (double s : metrics.agent_proc_seconds) proc_total += s;
    result.min_dist.push_back(metrics.target_min_dist);
    if (options.record_trajectories) {
      for (std::size_t j = 0; j < sim.agents().size(); ++j) {
        result.agent_traj[j].push_back(sim.agents()[j].truth.pos);
      }
      for (std::size_t i = 0; i < sim.targets().size(); ++i) {
        result.target_traj[i].push_back(sim.targets()[i].pos);
      }
    }
    if (options.log_raw) {
      metrics.fim_logdet.resize(sim.agents().size());
      for (std::size_t j = 0; j < sim.agents().size(); ++j) {
        auto& row = metrics.fim_logdet[j];
        row.assign(sim.targets().size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < sim.targets().size(); ++i) {
          if (!sim.agents()[j].tracks[i]) continue;
          try {
            row[i] = -log_det_spd(sim.agents()[j].tracks[i]->p);
          } catch (const NonPositiveDefiniteInformation&) {
          }
        }
      }
      result.raw.push_back(std::move(metrics));
    }
  }
  result.total_seconds = seconds_since(t0);
  const double denom = static_cast<double>(cfg.n_steps) * std::max(cfg.n_agents, 1);
  result.mean_agent_proc_seconds = proc_total / denom;

  result.final_targets = sim.targets();
  result.final_agents.reserve(sim.agents().size());
  result.final_tracks.reserve(sim.agents().size());
  for (const auto& agent : sim.agents()) {
    result.final_agents.push_back(agent.truth);
    result.final_tracks.push_back(agent.tracks);
  }
  return result;
}

std::vector<ReplicationResult> run_replications(const ScenarioConfig& cfg, int n_reps,
                                                std::uint64_t base_seed, int parallelism,
                                                const RunOptions& options) {
  std::vector<ReplicationResult> results(static_cast<std::size_t>(n_reps));
  const auto run_one = [&](int r) {
    RunOptions opts = options;
    opts.record_trajectories = options.record_trajectories && r == 0;
    results[static_cast<std::size_t>(r)] =
        run_replication(cfg, base_seed + static_cast<std::uint64_t>(r), opts);
  };

  const int workers = std::min(std::max(parallelism, 1), n_reps);
  if (workers <= 1) {
    for (int r = 0; r < n_reps; ++r) run_one(r);
    return results;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < n_reps; r = next.fetch_add(1)) run_one(r);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

std::vector<double> median_min_distance(const std::vector<ReplicationResult>& results,
                                        MedianMode mode) {
  if (results.empty()) return {};
  const std::size_t n_steps = results.front().min_dist.size();
  std::vector<double> out(n_steps);
  std::vector<double> samples;
  for (std::size_t k = 0; k < n_steps; ++k) {
    samples.clear();
    for (const auto& rep : results) {
      const auto& dists = rep.min_dist[k];
      if (mode == MedianMode::pooled) {
        samples.insert(samples.end(), dists.begin(), dists.end());
      } else {
        double sum = 0.0;
        for (double d : dists) sum += d;
        samples.push_back(dists.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : sum / static_cast<double>(dists.size()));
      }
    }
    out[k] = median_of(samples);
  }
  return out;
}

}  // namespace swarmcso
