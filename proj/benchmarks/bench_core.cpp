#include <benchmark/benchmark.h>

#include "beamrl/env.hpp"
#include "beamrl/mcbs.hpp"
#include "beamrl/replay.hpp"
#include "beamrl/td3.hpp"

namespace {

using namespace beamrl;

Td3Agent bench_agent(std::size_t hidden, const EnvSpec& spec) {
  RngStream rng(1);
  Td3Config cfg;
  cfg.hidden_sizes = {hidden, hidden};
  cfg.exploration_sigma = 0.1;
  return make_agent(spec, cfg, rng);
}

void BM_MlpForward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  Mlp net = make_mlp({4, hidden, hidden, 1}, Activation::Relu, Activation::Identity);
  RngStream rng(2);
  init_uniform_fan_in(net, rng);
  MlpWorkspace ws;
  const Vector input = {0.1, -0.2, 0.3, 0.4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp_forward(net, input, ws));
  }
}
BENCHMARK(BM_MlpForward)->Arg(32)->Arg(64)->Arg(256);

void BM_MlpBackward(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  Mlp net = make_mlp({4, hidden, hidden, 1}, Activation::Relu, Activation::Identity);
  RngStream rng(3);
  init_uniform_fan_in(net, rng);
  Gradients grads = zero_gradients(net);
  MlpWorkspace ws;
  Vector input_grad;
  const Vector input = {0.1, -0.2, 0.3, 0.4};
  const Vector upstream = {1.0};
  for (auto _ : state) {
    mlp_backward_acc(net, input, upstream, grads, input_grad, ws);
    benchmark::DoNotOptimize(input_grad.data());
  }
}
BENCHMARK(BM_MlpBackward)->Arg(32)->Arg(64)->Arg(256);

void BM_EnvStep(benchmark::State& state) {
  auto env = make_env("pendulum-swingup", ResetMode::Train);
  RngStream rng(4);
  env->reset(rng);
  const Vector action = {0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(env->step(action));
  }
}
BENCHMARK(BM_EnvStep);

void BM_CriticUpdate(benchmark::State& state) {
  const auto env = make_env("pendulum-swingup", ResetMode::Train);
  Td3Agent agent = bench_agent(static_cast<std::size_t>(state.range(0)), env->spec());
  Td3Config cfg;
  cfg.hidden_sizes = agent.actor.layer_sizes;  // unused by the update itself
  cfg.exploration_sigma = 0.1;
  cfg.batch_size = static_cast<int>(state.range(1));

  ReplayBuffer buffer(4096, env->spec().obs_dim, env->spec().action_dim);
  RngStream data_rng(5);
  auto e = env->clone();
  Vector obs = e->reset(data_rng);
  for (int i = 0; i < 1024; ++i) {
    Vector a = {data_rng.uniform(-2.0, 2.0)};
    const StepResult sr = e->step(a);
    buffer.push({obs, a, sr.reward, sr.obs, sr.terminal});
    obs = sr.done() ? e->reset(data_rng) : sr.obs;
  }

  RngStream sample_rng(6), noise_rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(td3_learn_step(agent, buffer, cfg, sample_rng, noise_rng));
  }
}
BENCHMARK(BM_CriticUpdate)->Args({32, 128})->Args({64, 128})->Args({64, 256});

void BM_PlanAction(benchmark::State& state) {
  const auto env = make_env("pendulum-swingup", ResetMode::Train);
  Td3Agent agent = bench_agent(32, env->spec());
  Td3Config td3_cfg;
  td3_cfg.exploration_sigma = 0.2;

  McbsConfig cfg;
  cfg.beam_width = static_cast<int>(state.range(0));
  cfg.rollout_depth = static_cast<int>(state.range(1));
  cfg.beam_noise_sigma = 0.4;
  cfg.adaptive = false;

  auto live = env->clone();
  RngStream reset_rng(8);
  live->reset(reset_rng);
  Planner planner(cfg, *live);
  BudgetLedger ledger;
  RngStream beam_rng(9), rollout_rng(10), explore_rng(11);
  long step = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(planner.plan(agent, *live, ++step, {}, td3_cfg, ledger, beam_rng,
                                          rollout_rng, explore_rng));
  }
}
BENCHMARK(BM_PlanAction)->Args({6, 3})->Args({18, 6});

}  // namespace

BENCHMARK_MAIN();
