#include "beamrl/td3.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "beamrl/checkpoint.hpp"

namespace beamrl {

namespace {

constexpr std::uint32_t kAgentTag = 0x33445442u;  // "BTD3"
constexpr std::uint32_t kAgentVersion = 1;

void concat_into(Vector& dst, const Vector& a, const Vector& b) {
  dst.clear();
  dst.reserve(a.size() + b.size());
  dst.insert(dst.end(), a.begin(), a.end());
  dst.insert(dst.end(), b.begin(), b.end());
}

void ensure_grads(Td3Agent& agent) {
  if (!agent.scratch.grads_ready) {
    agent.scratch.grad1 = zero_gradients(agent.critic1);
    agent.scratch.grad2 = zero_gradients(agent.critic2);
    agent.scratch.grad_actor = zero_gradients(agent.actor);
    agent.scratch.grads_ready = true;
  } else {
    agent.scratch.grad1.zero();
    agent.scratch.grad2.zero();
    agent.scratch.grad_actor.zero();
  }
}

CriticLosses critic_update_impl(Td3Agent& agent, std::span<const Transition* const> batch,
                                const Td3Config& cfg, RngStream& rng) {
  if (batch.empty()) throw std::invalid_argument("critic_update: empty batch");
  ensure_grads(agent);
  auto& sc = agent.scratch;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  CriticLosses losses;
  sc.upstream.assign(1, 0.0);
  for (const Transition* t : batch) {
    const double y = td3_target(agent, t->reward, t->next_state, t->terminal, cfg, rng);
    concat_into(sc.concat, t->state, t->action);

    const double q1 = mlp_forward(agent.critic1, sc.concat, sc.ws_a)[0];
    losses.critic1 += (q1 - y) * (q1 - y) * inv_n;
    sc.upstream[0] = 2.0 * (q1 - y) * inv_n;
    mlp_backward_acc(agent.critic1, sc.concat, sc.upstream, sc.grad1, sc.input_grad, sc.ws_a);

    const double q2 = mlp_forward(agent.critic2, sc.concat, sc.ws_a)[0];
    losses.critic2 += (q2 - y) * (q2 - y) * inv_n;
    sc.upstream[0] = 2.0 * (q2 - y) * inv_n;
    mlp_backward_acc(agent.critic2, sc.concat, sc.upstream, sc.grad2, sc.input_grad, sc.ws_a);
  }

  adam_step(agent.critic1, sc.grad1, agent.critic1_opt, cfg.critic_lr);
  adam_step(agent.critic2, sc.grad2, agent.critic2_opt, cfg.critic_lr);
  return losses;
}

double actor_update_impl(Td3Agent& agent, std::span<const Transition* const> batch,
                         const Td3Config& cfg, const CriticGradFn& critic) {
  if (batch.empty()) throw std::invalid_argument("actor_update: empty batch");
  ensure_grads(agent);
  auto& sc = agent.scratch;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  double loss = 0.0;
  Vector action(agent.action_dim);
  Vector upstream(agent.action_dim);
  for (const Transition* t : batch) {
    const Vector& out = mlp_forward(agent.actor, t->state, sc.ws_a);
    for (std::size_t i = 0; i < agent.action_dim; ++i) {
      action[i] = clip(agent.action_max * out[i], -agent.action_max, agent.action_max);
    }
    const double q = critic(t->state, action, sc.dq_da);
    loss -= q * inv_n;
    // d(-q)/d(net output) = -dq/da * action_max
    for (std::size_t i = 0; i < agent.action_dim; ++i) {
      upstream[i] = -sc.dq_da[i] * agent.action_max * inv_n;
    }
    mlp_backward_acc(agent.actor, t->state, upstream, sc.grad_actor, sc.input_grad, sc.ws_a);
  }

  adam_step(agent.actor, sc.grad_actor, agent.actor_opt, cfg.actor_lr);
  return loss;
}

std::vector<const Transition*> to_refs(std::span<const Transition> batch) {
  std::vector<const Transition*> refs;
  refs.reserve(batch.size());
  for (const Transition& t : batch) refs.push_back(&t);
  return refs;
}

}  // namespace

void Td3Config::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in (0,1]");
  if (policy_delay < 1) throw std::invalid_argument("policy_delay must be >= 1");
  if (target_noise_sigma < 0.0) throw std::invalid_argument("target_noise_sigma must be >= 0");
  if (target_noise_clip < 0.0) throw std::invalid_argument("target_noise_clip must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (warmup_steps < 0) throw std::invalid_argument("warmup_steps must be >= 0");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
}

Vector Td3Agent::policy_action(const Vector& obs) const {
  Vector out = mlp_forward(actor, obs);
  for (double& x : out) x = clip(action_max * x, -action_max, action_max);
  return out;
}

double Td3Agent::critic_value(const Mlp& critic, const Vector& obs, const Vector& action) const {
  Vector in;
  concat_into(in, obs, action);
  return mlp_forward(critic, in)[0];
}

Td3Agent make_agent(const EnvSpec& env, const Td3Config& cfg, RngStream& init_rng) {
  Td3Agent agent;
  agent.obs_dim = env.obs_dim;
  agent.action_dim = env.action_dim;
  agent.action_max = env.action_max;

  std::vector<std::size_t> actor_sizes{env.obs_dim};
  actor_sizes.insert(actor_sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  actor_sizes.push_back(env.action_dim);
  agent.actor = make_mlp(actor_sizes, Activation::Relu, Activation::Tanh);

  std::vector<std::size_t> critic_sizes{env.obs_dim + env.action_dim};
  critic_sizes.insert(critic_sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  critic_sizes.push_back(1);
  agent.critic1 = make_mlp(critic_sizes, Activation::Relu, Activation::Identity);
  agent.critic2 = make_mlp(critic_sizes, Activation::Relu, Activation::Identity);

  init_uniform_fan_in(agent.actor, init_rng);
  init_uniform_fan_in(agent.critic1, init_rng);
  init_uniform_fan_in(agent.critic2, init_rng);

  agent.actor_target = agent.actor;
  agent.critic1_target = agent.critic1;
  agent.critic2_target = agent.critic2;

  agent.actor_opt = make_adam_state(agent.actor);
  agent.critic1_opt = make_adam_state(agent.critic1);
  agent.critic2_opt = make_adam_state(agent.critic2);
  return agent;
}

Vector smooth_target(const Vector& action, const Vector& noise, double delta,
                     double action_max) {
  require_len(noise, action.size(), "smooth_target noise");
  Vector out(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    out[i] = clip(action[i] + clip(noise[i], -delta, delta), -action_max, action_max);
  }
  return out;
}

Vector smoothed_target_action(const Td3Agent& agent, const Vector& next_obs,
                              const Td3Config& cfg, RngStream& rng) {
  Vector raw = mlp_forward(agent.actor_target, next_obs);
  for (double& x : raw) x = clip(agent.action_max * x, -agent.action_max, agent.action_max);
  Vector noise(raw.size());
  for (double& n : noise) n = cfg.target_noise_sigma * rng.gauss();
  return smooth_target(raw, noise, cfg.target_noise_clip, agent.action_max);
}

double td3_target(const Td3Agent& agent, double reward, const Vector& next_obs, bool terminal,
                  const Td3Config& cfg, RngStream& rng) {
  const Vector next_action = smoothed_target_action(agent, next_obs, cfg, rng);
  const double q1 = agent.critic_value(agent.critic1_target, next_obs, next_action);
  const double q2 = agent.critic_value(agent.critic2_target, next_obs, next_action);
  if (!std::isfinite(q1) || !std::isfinite(q2)) {
    throw std::runtime_error("td3_target: non-finite target critic output (q1=" +
                             std::to_string(q1) + ", q2=" + std::to_string(q2) + ")");
  }
  return reward + cfg.gamma * (terminal ? 0.0 : 1.0) * std::min(q1, q2);
}

CriticLosses critic_update(Td3Agent& agent, std::span<const Transition> batch,
                           const Td3Config& cfg, RngStream& target_noise_rng) {
  const auto refs = to_refs(batch);
  return critic_update_impl(agent, refs, cfg, target_noise_rng);
}

double actor_update(Td3Agent& agent, std::span<const Transition> batch, const Td3Config& cfg) {
  const auto refs = to_refs(batch);
  auto critic = [&agent](const Vector& obs, const Vector& action, Vector& dq_da) {
    auto& sc = agent.scratch;
    concat_into(sc.concat, obs, action);
    const double q = mlp_forward(agent.critic1, sc.concat, sc.ws_b)[0];
    static const Vector kOne{1.0};
    mlp_backward_input(agent.critic1, sc.concat, kOne, sc.input_grad, sc.ws_b);
    dq_da.assign(sc.input_grad.begin() + static_cast<std::ptrdiff_t>(obs.size()),
                 sc.input_grad.end());
    return q;
  };
  return actor_update_impl(agent, refs, cfg, critic);
}

double actor_update_with_critic(Td3Agent& agent, std::span<const Transition> batch,
                                const Td3Config& cfg, const CriticGradFn& critic) {
  const auto refs = to_refs(batch);
  return actor_update_impl(agent, refs, cfg, critic);
}

void target_sync(Td3Agent& agent, const Td3Config& cfg) {
  polyak_update(agent.actor_target, agent.actor, cfg.tau);
  polyak_update(agent.critic1_target, agent.critic1, cfg.tau);
  polyak_update(agent.critic2_target, agent.critic2, cfg.tau);
}

Vector explore_action(const Td3Agent& agent, const Vector& obs, const Td3Config& cfg,
                      RngStream& rng) {
  Vector a = agent.policy_action(obs);
  for (double& x : a) x = x + cfg.exploration_sigma * rng.gauss();
  return clip_action(std::move(a), agent.action_max);
}

LearnerStats td3_learn_step(Td3Agent& agent, const ReplayBuffer& buffer, const Td3Config& cfg,
                            RngStream& sample_rng, RngStream& target_noise_rng) {
  auto& refs = agent.scratch.batch_refs;
  buffer.sample_refs(static_cast<std::size_t>(cfg.batch_size), sample_rng, refs);

  LearnerStats stats;
  const CriticLosses losses = critic_update_impl(agent, refs, cfg, target_noise_rng);
  stats.critic1_loss = losses.critic1;
  stats.critic2_loss = losses.critic2;

  agent.update_count += 1;
  if (agent.update_count % static_cast<std::uint64_t>(cfg.policy_delay) == 0) {
    auto critic = [&agent](const Vector& obs, const Vector& action, Vector& dq_da) {
      auto& sc = agent.scratch;
      concat_into(sc.concat, obs, action);
      const double q = mlp_forward(agent.critic1, sc.concat, sc.ws_b)[0];
      static const Vector kOne{1.0};
      mlp_backward_input(agent.critic1, sc.concat, kOne, sc.input_grad, sc.ws_b);
      dq_da.assign(sc.input_grad.begin() + static_cast<std::ptrdiff_t>(obs.size()),
                   sc.input_grad.end());
      return q;
    };
    stats.actor_loss = actor_update_impl(agent, refs, cfg, critic);
    stats.actor_updated = true;
    target_sync(agent, cfg);
  }
  return stats;
}

void save_agent_checkpoint(const Td3Agent& agent, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint file for writing: " + path);
  out.write(reinterpret_cast<const char*>(&kAgentTag), sizeof(kAgentTag));
  out.write(reinterpret_cast<const char*>(&kAgentVersion), sizeof(kAgentVersion));
  const std::uint64_t obs = agent.obs_dim, act = agent.action_dim, upd = agent.update_count;
  out.write(reinterpret_cast<const char*>(&obs), sizeof(obs));
  out.write(reinterpret_cast<const char*>(&act), sizeof(act));
  out.write(reinterpret_cast<const char*>(&agent.action_max), sizeof(double));
  out.write(reinterpret_cast<const char*>(&upd), sizeof(upd));
  write_mlp(out, agent.actor);
  write_mlp(out, agent.actor_target);
  write_mlp(out, agent.critic1);
  write_mlp(out, agent.critic2);
  write_mlp(out, agent.critic1_target);
  write_mlp(out, agent.critic2_target);
  write_adam_state(out, agent.actor_opt);
  write_adam_state(out, agent.critic1_opt);
  write_adam_state(out, agent.critic2_opt);
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Td3Agent load_agent_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
  std::uint32_t tag = 0, version = 0;
  in.read(reinterpret_cast<char*>(&tag), sizeof(tag));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || tag != kAgentTag) throw std::runtime_error("not an agent checkpoint: " + path);
  if (version != kAgentVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  Td3Agent agent;
  std::uint64_t obs = 0, act = 0, upd = 0;
  in.read(reinterpret_cast<char*>(&obs), sizeof(obs));
  in.read(reinterpret_cast<char*>(&act), sizeof(act));
  in.read(reinterpret_cast<char*>(&agent.action_max), sizeof(double));
  in.read(reinterpret_cast<char*>(&upd), sizeof(upd));
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  agent.obs_dim = static_cast<std::size_t>(obs);
  agent.action_dim = static_cast<std::size_t>(act);
  agent.update_count = upd;
  agent.actor = read_mlp(in);
  agent.actor_target = read_mlp(in);
  agent.critic1 = read_mlp(in);
  agent.critic2 = read_mlp(in);
  agent.critic1_target = read_mlp(in);
  agent.critic2_target = read_mlp(in);
  agent.actor_opt = read_adam_state(in, agent.actor);
  agent.critic1_opt = read_adam_state(in, agent.critic1);
  agent.critic2_opt = read_adam_state(in, agent.critic2);
  return agent;
}

}  // namespace beamrl
