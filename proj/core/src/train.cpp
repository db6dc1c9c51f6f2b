#include "beamrl/train.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>

namespace beamrl {

namespace {

double episode_return_of(const Td3Agent& agent, Env& env, RngStream& reset_rng) {
  Vector obs = env.reset(reset_rng);
  double ret = 0.0;
  while (true) {
    const StepResult sr = env.step(agent.policy_action(obs));
    ret += sr.reward;
    obs = sr.obs;
    if (sr.done()) return ret;
  }
}

EvalResult summarize(const std::vector<double>& returns) {
  return {mean(returns), population_stddev(returns)};
}

}  // namespace

EvalResult evaluate(const Td3Agent& agent, const Env& prototype, int episodes,
                    std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  const auto env = prototype.clone();
  RngStream rng(seed);
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    returns.push_back(episode_return_of(agent, *env, rng));
  }
  return summarize(returns);
}

EvalResult evaluate_with_planner(const Td3Agent& agent, const Env& prototype, int episodes,
                                 std::uint64_t seed, const McbsConfig& mcbs_cfg,
                                 const Td3Config& td3_cfg) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  const auto env = prototype.clone();
  Planner planner(mcbs_cfg, *env);
  Td3Config det_cfg = td3_cfg;
  det_cfg.exploration_sigma = 0.0;  // the off-beam path stays deterministic
  BudgetLedger scratch_ledger;
  RngStream reset_rng(derive_seed(seed, "eval-reset"));
  RngStream beam_rng(derive_seed(seed, "eval-beam"));
  RngStream rollout_rng(derive_seed(seed, "eval-rollout"));
  RngStream explore_rng(derive_seed(seed, "eval-explore"));

  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    Vector obs = env->reset(reset_rng);
    double ret = 0.0;
    long step = 0;
    while (true) {
      const auto decision = planner.plan(agent, *env, step, {}, det_cfg, scratch_ledger,
                                         beam_rng, rollout_rng, explore_rng);
      const StepResult sr = env->step(decision.action);
      ret += sr.reward;
      obs = sr.obs;
      step += 1;
      if (sr.done()) break;
    }
    returns.push_back(ret);
  }
  return summarize(returns);
}

TrainResult train(const RunConfig& cfg_in, const RowCallback& on_row) {
  RunConfig cfg = cfg_in;
  auto env = make_env(cfg.env_name, ResetMode::Train);
  cfg.resolve_noise_scales(env->spec().action_max);
  cfg.validate();

  std::filesystem::create_directories(cfg.out_dir);
  TrainResult result;
  result.metrics_path = cfg.out_dir + "/metrics.csv";
  result.checkpoint_path = cfg.out_dir + "/checkpoint.bin";
  result.manifest_path = cfg.out_dir + "/manifest.txt";

  {
    std::ofstream manifest(result.manifest_path);
    if (!manifest) throw std::runtime_error("cannot write manifest: " + result.manifest_path);
    manifest << render_config(cfg);
  }
  std::ofstream csv(result.metrics_path);
  if (!csv) throw std::runtime_error("cannot write metrics: " + result.metrics_path);
  csv << kMetricsHeader << "\n";
  csv.flush();

  // independent substreams so toggling the beam leaves every other stream
  // untouched
  RngStream init_rng(derive_seed(cfg.seed, "weight-init"));
  RngStream env_reset_rng(derive_seed(cfg.seed, "env-reset"));
  RngStream exploration_rng(derive_seed(cfg.seed, "exploration"));
  RngStream target_noise_rng(derive_seed(cfg.seed, "target-noise"));
  RngStream beam_rng(derive_seed(cfg.seed, "beam"));
  RngStream rollout_rng(derive_seed(cfg.seed, "rollout"));
  RngStream buffer_rng(derive_seed(cfg.seed, "buffer-sampling"));
  const std::uint64_t eval_seed = derive_seed(cfg.seed, "eval");

  Td3Agent agent = make_agent(env->spec(), cfg.td3, init_rng);
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.replay_capacity), env->spec().obs_dim,
                      env->spec().action_dim);
  std::optional<Planner> planner;
  if (cfg.algorithm == Algorithm::McbsTd3) planner.emplace(cfg.mcbs, *env);

  BudgetLedger ledger;
  std::vector<double> eval_means;
  long episodes_done = 0;
  double train_return_last = std::numeric_limits<double>::quiet_NaN();
  long beam_steps_in_window = 0;
  long steps_in_window = 0;

  const auto t0 = std::chrono::steady_clock::now();
  const auto wall_now = [&]() {
    if (cfg.deterministic_timing) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const auto write_row = [&](long step, double eval_mean, double eval_std) {
    MetricsRow row;
    row.real_step = step;
    row.episodes_done = episodes_done;
    row.train_return_last = train_return_last;
    row.eval_return_mean = eval_mean;
    row.eval_return_std = eval_std;
    row.rollout_env_steps_cum = ledger.rollout_env_steps;
    row.beam_on_fraction =
        steps_in_window > 0
            ? static_cast<double>(beam_steps_in_window) / static_cast<double>(steps_in_window)
            : 0.0;
    row.wall_seconds = wall_now();
    result.rows.push_back(row);
    csv << format_metrics_row(row) << "\n";
    csv.flush();
    beam_steps_in_window = 0;
    steps_in_window = 0;
    if (on_row) on_row(row);
  };

  const auto run_eval = [&](long step) {
    const EvalResult er =
        cfg.eval_with_beam
            ? evaluate_with_planner(agent, *env, cfg.eval_episodes, eval_seed, cfg.mcbs,
                                    cfg.td3)
            : evaluate(agent, *env, cfg.eval_episodes, eval_seed);
    eval_means.push_back(er.mean);
    write_row(step, er.mean, er.stddev);
  };

  if (cfg.total_steps > 0) {
    run_eval(0);

    Vector obs = env->reset(env_reset_rng);
    double episode_return = 0.0;

    for (long step = 1; step <= cfg.total_steps; ++step) {
      Vector action;
      bool beam_used = false;
      if (step <= cfg.td3.warmup_steps) {
        action.resize(env->spec().action_dim);
        for (double& a : action) {
          a = exploration_rng.uniform(-env->spec().action_max, env->spec().action_max);
        }
      } else if (cfg.algorithm == Algorithm::Td3) {
        action = explore_action(agent, obs, cfg.td3, exploration_rng);
      } else {
        auto decision = planner->plan(agent, *env, step, eval_means, cfg.td3, ledger,
                                      beam_rng, rollout_rng, exploration_rng);
        action = std::move(decision.action);
        beam_used = decision.beam_used;
      }

      const StepResult sr = env->step(action);
      ledger.real_env_steps += 1;
      steps_in_window += 1;
      if (beam_used) beam_steps_in_window += 1;

      if (!std::isfinite(sr.reward)) {
        write_row(step, std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN());
        throw std::runtime_error("train: non-finite reward at step " + std::to_string(step));
      }

      buffer.push({obs, action, sr.reward, sr.obs, sr.terminal});
      episode_return += sr.reward;
      obs = sr.obs;

      if (sr.done()) {
        episodes_done += 1;
        train_return_last = episode_return;
        episode_return = 0.0;
        obs = env->reset(env_reset_rng);
      }

      if (step > cfg.td3.warmup_steps &&
          buffer.size() >= static_cast<std::size_t>(cfg.td3.batch_size)) {
        const LearnerStats stats =
            td3_learn_step(agent, buffer, cfg.td3, buffer_rng, target_noise_rng);
        if (!std::isfinite(stats.critic1_loss) || !std::isfinite(stats.critic2_loss) ||
            (stats.actor_updated && !std::isfinite(stats.actor_loss))) {
          write_row(step, std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN());
          throw std::runtime_error("train: non-finite loss at step " + std::to_string(step));
        }
      }

      if (step % cfg.eval_interval == 0) run_eval(step);
    }
  }

  save_agent_checkpoint(agent, result.checkpoint_path);
  result.ledger = ledger;
  return result;
}

}  // namespace beamrl
