#include <benchmark/benchmark.h>

#include "swarmcso/decision.hpp"
#include "swarmcso/engine.hpp"

namespace {

using namespace swarmcso;

void BM_Jacobian(benchmark::State& state) {
  const EnuVector rel{3.0, 4.0, 1.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(jacobian(rel));
  }
}
BENCHMARK(BM_Jacobian);

void BM_Hessians(benchmark::State& state) {
  const EnuVector rel{3.0, 4.0, 1.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(hessians(rel));
  }
}
BENCHMARK(BM_Hessians);

void BM_SecondOrderUpdate(benchmark::State& state) {
  ScenarioConfig cfg;
  const NoiseModel noise = cfg.noise_model();
  TrackEstimate est;
  est.x << 4, 2, 1, 0.1, 0, 0;
  est.p = 0.5 * Mat66::Identity();
  est.stage = Stage::predicted;
  const Measurement z = measure({4.1, 2.05, 1.02}, {0, 0, 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(update(est, z, {0, 0, 0}, noise, true));
  }
}
BENCHMARK(BM_SecondOrderUpdate);

void BM_LossGradient(benchmark::State& state) {
  const auto n_peers = state.range(0);
  ScenarioConfig cfg;
  DecisionContext ctx;
  ctx.own_pos = {0, 0, 0};
  ctx.noise = cfg.noise_model();
  ctx.detect_scale = cfg.detect_scale;
  ctx.speed = 1.0;
  Vec6 sim;
  sim << 5, 3, 1, 0, 0, 0;
  Mat66 constant = 10.0 * Mat66::Identity();
  for (int l = 0; l < n_peers; ++l) {
    constant += measurement_information(sim, {1.0 + l, -2.0, 0.5}, ctx.noise, ctx.detect_scale);
  }
  ctx.target_ids = {0};
  ctx.sim_states = {sim};
  ctx.constant_fim = {constant};
  ctx.pre_total = {10.0 * Mat66::Identity()};
  const GradientStepConfig g;
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_gradient(ctx, {0.4, 0.2}, ActionParam::heading, g));
  }
}
BENCHMARK(BM_LossGradient)->Arg(1)->Arg(4)->Arg(9);

void BM_SimulationStep(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.n_agents = static_cast<int>(state.range(0));
  cfg.n_targets = 2;
  cfg.n_steps = 1 << 20;
  Simulation sim(cfg, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim.step());
  }
}
BENCHMARK(BM_SimulationStep)->Arg(2)->Arg(5)->Arg(10);

void BM_Replication(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.n_agents = 2;
  cfg.n_targets = 2;
  cfg.n_steps = 200;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_replication(cfg, seed++));
  }
}
BENCHMARK(BM_Replication);

}  // namespace

BENCHMARK_MAIN();
