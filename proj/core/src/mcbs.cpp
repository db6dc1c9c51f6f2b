#include "beamrl/mcbs.hpp"

#include <cmath>
#include <stdexcept>

namespace beamrl {

void McbsConfig::validate() const {
  if (beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
  if (rollout_depth < 0) throw std::invalid_argument("rollout_depth must be >= 0");
  if (num_sims < 1) throw std::invalid_argument("num_sims must be >= 1");
  if (saturation_window < 1) throw std::invalid_argument("saturation_window must be >= 1");
  if (saturation_epsilon < 0.0) throw std::invalid_argument("saturation_epsilon must be >= 0");
  if (min_beam_interval < 1) throw std::invalid_argument("min_beam_interval must be >= 1");
}

std::vector<Vector> generate_beam(const PolicyFn& policy, const Vector& obs, int beam_width,
                                  double sigma, double action_max, RngStream& rng) {
  if (beam_width < 1) throw std::invalid_argument("generate_beam: beam_width must be >= 1");
  const Vector base = policy(obs);
  std::vector<Vector> actions;
  actions.reserve(static_cast<std::size_t>(beam_width));
  for (int i = 0; i < beam_width; ++i) {
    Vector a = base;
    for (double& x : a) x += sigma * rng.gauss();
    actions.push_back(clip_action(std::move(a), action_max));
  }
  return actions;
}

double short_horizon(Env& scratch, const EnvSnapshot& snap, const Vector& first_action,
                     int depth, double gamma, double sigma, double action_max,
                     const PolicyFn& policy, const BootstrapFn& bootstrap, RngStream& rng,
                     BudgetLedger& ledger) {
  scratch.restore(snap);

  if (depth == 0) {
    ledger.critic_forwards += 2;
    const double value = bootstrap(scratch.observe(), first_action);
    if (!std::isfinite(value)) {
      throw std::runtime_error("short_horizon: non-finite critic bootstrap at depth 0");
    }
    return value;
  }

  double ret = 0.0;
  double alpha = 1.0;
  Vector action = first_action;
  for (int d = 0; d < depth; ++d) {
    const StepResult sr = scratch.step(action);
    ledger.rollout_env_steps += 1;
    ret += alpha * sr.reward;
    alpha *= gamma;
    if (sr.terminal) return ret;
    // time-limit truncation does not end the rollout; the scratch instance
    // keeps integrating valid dynamics past the episode horizon
    action = policy(sr.obs);
    ledger.actor_forwards += 1;
    for (double& x : action) x += sigma * rng.gauss();
    action = clip_action(std::move(action), action_max);
  }

  ledger.critic_forwards += 2;
  const double tail = bootstrap(scratch.observe(), action);
  if (!std::isfinite(tail)) {
    throw std::runtime_error("short_horizon: non-finite critic bootstrap");
  }
  return ret + alpha * tail;
}

std::vector<Candidate> evaluate_candidates(Env& scratch, const EnvSnapshot& snap,
                                           std::vector<Vector> actions, int depth,
                                           int num_sims, double gamma, double sigma,
                                           double action_max, const PolicyFn& policy,
                                           const BootstrapFn& bootstrap,
                                           std::uint64_t rollout_seed, BudgetLedger& ledger) {
  if (actions.empty()) throw std::invalid_argument("evaluate_candidates: no candidates");
  if (num_sims < 1) throw std::invalid_argument("evaluate_candidates: num_sims must be >= 1");

  std::vector<Candidate> candidates;
  candidates.reserve(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    Candidate c;
    c.action = std::move(actions[i]);
    c.returns.reserve(static_cast<std::size_t>(num_sims));
    for (int j = 0; j < num_sims; ++j) {
      // one substream per (candidate, simulation) pair; independent of
      // execution order
      const std::uint64_t sub =
          mix64(rollout_seed + mix64((static_cast<std::uint64_t>(i) << 32) +
                                     static_cast<std::uint64_t>(j)));
      RngStream rollout_rng(sub);
      c.returns.push_back(short_horizon(scratch, snap, c.action, depth, gamma, sigma,
                                        action_max, policy, bootstrap, rollout_rng, ledger));
    }
    c.score = mean(c.returns);
    candidates.push_back(std::move(c));
  }
  return candidates;
}

std::size_t select_action(std::span<const Candidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_action: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!std::isfinite(candidates[i].score)) {
      throw std::runtime_error("select_action: non-finite score at candidate " +
                               std::to_string(i));
    }
    if (candidates[i].score > candidates[best].score) best = i;
  }
  return best;
}

bool saturation_schedule(std::span<const double> eval_means, const McbsConfig& cfg) {
  const auto window = static_cast<std::size_t>(cfg.saturation_window);
  if (eval_means.size() < window) return true;

  double running_max = eval_means[0];
  for (double m : eval_means) running_max = std::max(running_max, m);
  const double latest = eval_means.back();

  // slump below the running maximum resumes full-rate planning
  if (running_max - latest > cfg.saturation_epsilon * std::max(std::abs(running_max), 1e-12)) {
    return true;
  }

  const double first = eval_means[eval_means.size() - window];
  const double rel = (latest - first) / std::max(std::abs(first), 1e-12);
  return rel >= cfg.saturation_epsilon;
}

Planner::Planner(McbsConfig cfg, const Env& live_prototype)
    : cfg_(cfg), scratch_(live_prototype.clone()) {
  cfg_.validate();
}

Planner::Decision Planner::plan(const Td3Agent& agent, const Env& live, long real_step,
                                std::span<const double> eval_means, const Td3Config& td3_cfg,
                                BudgetLedger& ledger, RngStream& beam_rng,
                                RngStream& rollout_rng, RngStream& explore_rng) {
  bool beam_on = true;
  if (cfg_.beam_width == 1 && cfg_.beam_noise_sigma == 0.0) {
    // degenerate beam reduces to the deterministic policy action; skip the
    // planning machinery entirely so the run matches plain TD3 step for step
    beam_on = false;
  } else if (cfg_.adaptive && !saturation_schedule(eval_means, cfg_) &&
             real_step % cfg_.min_beam_interval != 0) {
    beam_on = false;
  }

  if (!beam_on) {
    return {explore_action(agent, live.observe(), td3_cfg, explore_rng), false};
  }

  const EnvSnapshot snap = live.snapshot();
  const PolicyFn policy = make_policy_fn(agent);
  const BootstrapFn bootstrap = make_twin_critic_bootstrap(agent);

  ledger.actor_forwards += 1;  // the shared policy evaluation behind the beam
  std::vector<Vector> actions = generate_beam(policy, live.observe(), cfg_.beam_width,
                                              cfg_.beam_noise_sigma, agent.action_max,
                                              beam_rng);
  std::vector<Candidate> candidates = evaluate_candidates(
      *scratch_, snap, std::move(actions), cfg_.rollout_depth, cfg_.num_sims, td3_cfg.gamma,
      cfg_.beam_noise_sigma, agent.action_max, policy, bootstrap, rollout_rng.next_u64(),
      ledger);
  const std::size_t best = select_action(candidates);
  return {std::move(candidates[best].action), true};
}

PolicyFn make_policy_fn(const Td3Agent& agent) {
  return [&agent](const Vector& obs) { return agent.policy_action(obs); };
}

BootstrapFn make_twin_critic_bootstrap(const Td3Agent& agent) {
  return [&agent](const Vector& obs, const Vector& action) {
    return std::min(agent.critic_value(agent.critic1, obs, action),
                    agent.critic_value(agent.critic2, obs, action));
  };
}

}  // namespace beamrl
