#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "swarmcso/engine.hpp"

using namespace swarmcso;

TEST_CASE("zero agents: targets still move, per-agent fields stay empty") {
  ScenarioConfig cfg;
  cfg.n_agents = 0;
  cfg.n_targets = 2;
  cfg.n_steps = 5;
  Simulation sim(cfg, 1);
  const EnuVector before = sim.targets()[0].pos;
  const StepMetrics m = sim.step();
  CHECK(m.agent_proc_seconds.empty());
  CHECK(m.target_min_dist.size() == 2);
  CHECK(distance(before, sim.targets()[0].pos) > 0.0);
}

TEST_CASE("forced detection and tiny noise: smoothed pursuit distance shrinks") {
  ScenarioConfig cfg;
  cfg.n_agents = 1;
  cfg.n_targets = 1;
  cfg.n_steps = 400;
  cfg.detect_scale = 1e12;  // detection probability 1 at any range
  cfg.sigma_r = 1e-6;
  cfg.sigma_phi = 1e-6;
  cfg.sigma_theta = 1e-6;

  // pick a seed whose initial layout starts the agent well away from the target
  std::uint64_t seed = 0;
  for (std::uint64_t s = 1; s < 64; ++s) {
    Simulation probe(cfg, s);
    if (distance(probe.agents()[0].truth.pos, probe.targets()[0].pos) > 6.0) {
      seed = s;
      break;
    }
  }
  REQUIRE(seed != 0);

  const ReplicationResult rep = run_replication(cfg, seed);
  auto window_mean = [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += rep.min_dist[k][0];
    return s / static_cast<double>(hi - lo);
  };
  const double early = window_mean(0, 25);
  const double mid = window_mean(100, 150);
  const double late = window_mean(350, 400);
  CHECK(early > mid);
  CHECK(mid >= late - 0.5);
  CHECK(late < 3.0);
}

TEST_CASE("replay determinism: same seed gives the identical trajectory") {
  ScenarioConfig cfg;
  cfg.n_agents = 2;
  cfg.n_targets = 2;
  cfg.n_steps = 60;
  const ReplicationResult a = run_replication(cfg, 9);
  const ReplicationResult b = run_replication(cfg, 9);
  REQUIRE(a.min_dist.size() == b.min_dist.size());
  for (std::size_t k = 0; k < a.min_dist.size(); ++k) {
    for (std::size_t i = 0; i < a.min_dist[k].size(); ++i) {
      CHECK(a.min_dist[k][i] == b.min_dist[k][i]);
    }
  }
  CHECK(a.final_agents[0].pos.e == b.final_agents[0].pos.e);
  CHECK(a.final_agents[1].gamma == b.final_agents[1].gamma);
}

TEST_CASE("replications: seed layout and parallelism independence") {
  ScenarioConfig cfg;
  cfg.n_agents = 2;
  cfg.n_targets = 1;
  cfg.n_steps = 40;
  const auto serial = run_replications(cfg, 6, 100, 1);
  const auto parallel = run_replications(cfg, 6, 100, 2);
  REQUIRE(serial.size() == 6);
  for (int r = 0; r < 6; ++r) {
    CHECK(serial[static_cast<std::size_t>(r)].seed == 100 + static_cast<std::uint64_t>(r));
    for (std::size_t k = 0; k < serial[static_cast<std::size_t>(r)].min_dist.size(); ++k) {
      CHECK(serial[static_cast<std::size_t>(r)].min_dist[k][0] ==
            parallel[static_cast<std::size_t>(r)].min_dist[k][0]);
    }
  }
  const auto m_serial = median_min_distance(serial);
  const auto m_parallel = median_min_distance(parallel);
  for (std::size_t k = 0; k < m_serial.size(); ++k) CHECK(m_serial[k] == m_parallel[k]);
}

TEST_CASE("median_min_distance matches a naive recomputation") {
  // synthetic results with known values
  std::vector<ReplicationResult> results(3);
  Rng rng(5);
  for (auto& rep : results) {
    rep.min_dist.resize(4);
    for (auto& step : rep.min_dist) {
      step.resize(2);
      for (auto& v : step) v = rng.uniform(0.0, 10.0);
    }
  }
  const auto m = median_min_distance(results, MedianMode::pooled);
  REQUIRE(m.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> pool;
    for (const auto& rep : results) {
      pool.insert(pool.end(), rep.min_dist[k].begin(), rep.min_dist[k].end());
    }
    std::sort(pool.begin(), pool.end());
    const double expect = 0.5 * (pool[2] + pool[3]);
    CHECK(m[k] == doctest::Approx(expect));
  }

  // single replication, single target: the series itself
  std::vector<ReplicationResult> one(1);
  one[0].min_dist = {{1.5}, {2.5}, {0.5}};
  const auto m1 = median_min_distance(one);
  CHECK(m1[0] == 1.5);
  CHECK(m1[1] == 2.5);
  CHECK(m1[2] == 0.5);

  // all distances equal
  std::vector<ReplicationResult> flat(2);
  flat[0].min_dist = {{3.0, 3.0}};
  flat[1].min_dist = {{3.0, 3.0}};
  CHECK(median_min_distance(flat)[0] == 3.0);
}

TEST_CASE("metric sanity and APT bookkeeping") {
  ScenarioConfig cfg;
  cfg.n_agents = 3;
  cfg.n_targets = 2;
  cfg.n_steps = 30;
  const ReplicationResult rep = run_replication(cfg, 3);
  for (const auto& step : rep.min_dist) {
    for (double d : step) {
      CHECK(d >= 0.0);
      CHECK(std::isfinite(d));
    }
  }
  CHECK(rep.total_seconds > 0.0);
  CHECK(rep.mean_agent_proc_seconds > 0.0);
  CHECK(rep.mean_agent_proc_seconds < rep.total_seconds);
}

TEST_CASE("group isolation: no snapshot ever crosses a group boundary") {
  ScenarioConfig cfg;
  cfg.n_agents = 4;
  cfg.n_targets = 2;
  cfg.group_sizes = {2, 2};
  cfg.n_steps = 50;
  cfg.comm_divisor = 1e12;  // communication succeeds at any range within a group
  Simulation sim(cfg, 17);
  for (int k = 0; k < 50; ++k) {
    sim.step();
    for (int j = 0; j < 4; ++j) {
      const auto& agent = sim.agents()[static_cast<std::size_t>(j)];
      for (int l = 0; l < 4; ++l) {
        const bool same_group = (j / 2) == (l / 2);
        if (l == j) continue;
        if (!same_group) {
          CHECK_FALSE(agent.view.peers[static_cast<std::size_t>(l)].has_value());
        }
      }
    }
  }
  // in-group snapshots did flow
  CHECK(sim.agents()[0].view.peers[1].has_value());
  CHECK(sim.agents()[3].view.peers[2].has_value());
}

TEST_CASE("raw logging records per-agent per-target information levels") {
  ScenarioConfig cfg;
  cfg.n_agents = 1;
  cfg.n_targets = 1;
  cfg.n_steps = 20;
  cfg.detect_scale = 1e12;
  RunOptions opts;
  opts.log_raw = true;
  const ReplicationResult rep = run_replication(cfg, 21, opts);
  REQUIRE(rep.raw.size() == 20);
  CHECK(rep.raw.back().fim_logdet.size() == 1);
  CHECK(std::isfinite(rep.raw.back().fim_logdet[0][0]));
  // information grows from the initial unit covariance once updates flow
  CHECK(rep.raw.back().fim_logdet[0][0] > rep.raw.front().fim_logdet[0][0]);
}
