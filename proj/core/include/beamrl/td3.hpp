#pragma once

#include <functional>
#include <span>
#include <string>

#include "beamrl/env.hpp"
#include "beamrl/mlp.hpp"
#include "beamrl/optim.hpp"
#include "beamrl/replay.hpp"
#include "beamrl/rng.hpp"

namespace beamrl {

struct Td3Config {
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double target_noise_sigma = 0.2;   // sigma of the target-smoothing noise
  double target_noise_clip = 0.5;    // clip bound delta on that noise
  double exploration_sigma = -1.0;   // negative = resolve to 0.1 * action_max
  int batch_size = 256;
  long warmup_steps = 1000;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  std::vector<std::size_t> hidden_sizes = {256, 256};

  void validate() const;
};

// Reusable buffers for the batched update loops.
struct Td3Scratch {
  MlpWorkspace ws_a, ws_b;
  Gradients grad1, grad2, grad_actor;
  Vector concat, upstream, input_grad, dq_da;
  std::vector<const Transition*> batch_refs;
  bool grads_ready = false;
};

struct Td3Agent {
  Mlp actor, actor_target;
  Mlp critic1, critic2, critic1_target, critic2_target;
  AdamState actor_opt, critic1_opt, critic2_opt;
  std::uint64_t update_count = 0;
  std::size_t obs_dim = 0, action_dim = 0;
  double action_max = 1.0;
  Td3Scratch scratch;

  // deterministic policy action, scaled to [-action_max, action_max]
  Vector policy_action(const Vector& obs) const;
  double critic_value(const Mlp& critic, const Vector& obs, const Vector& action) const;
};

Td3Agent make_agent(const EnvSpec& env, const Td3Config& cfg, RngStream& init_rng);

// pure double-clip used by target smoothing:
// clip(action + clip(noise, -delta, delta), -action_max, action_max)
Vector smooth_target(const Vector& action, const Vector& noise, double delta,
                     double action_max);

Vector smoothed_target_action(const Td3Agent& agent, const Vector& next_obs,
                              const Td3Config& cfg, RngStream& rng);

double td3_target(const Td3Agent& agent, double reward, const Vector& next_obs, bool terminal,
                  const Td3Config& cfg, RngStream& rng);

struct CriticLosses {
  double critic1 = 0.0;
  double critic2 = 0.0;
};

// One Adam step on each critic against a shared per-sample target (same
// target-noise draws for both). Returns pre-update mean squared errors.
CriticLosses critic_update(Td3Agent& agent, std::span<const Transition> batch,
                           const Td3Config& cfg, RngStream& target_noise_rng);

// Returns Q at (obs, action) and fills dq_da with the gradient of Q with
// respect to the action.
using CriticGradFn =
    std::function<double(const Vector& obs, const Vector& action, Vector& dq_da)>;

// One Adam step on -mean Q(s, pi(s)); critics are left untouched.
double actor_update(Td3Agent& agent, std::span<const Transition> batch, const Td3Config& cfg);
double actor_update_with_critic(Td3Agent& agent, std::span<const Transition> batch,
                                const Td3Config& cfg, const CriticGradFn& critic);

// Polyak-blend all three target networks toward their online counterparts.
void target_sync(Td3Agent& agent, const Td3Config& cfg);

// clip(pi(s) + eps, +-action_max), eps ~ N(0, exploration_sigma^2). The noise
// draw always happens so stream consumption does not depend on sigma.
Vector explore_action(const Td3Agent& agent, const Vector& obs, const Td3Config& cfg,
                      RngStream& rng);

struct LearnerStats {
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double actor_loss = 0.0;
  bool actor_updated = false;
};

// One critic gradient step plus the delayed actor/target update.
LearnerStats td3_learn_step(Td3Agent& agent, const ReplayBuffer& buffer, const Td3Config& cfg,
                            RngStream& sample_rng, RngStream& target_noise_rng);

void save_agent_checkpoint(const Td3Agent& agent, const std::string& path);
Td3Agent load_agent_checkpoint(const std::string& path);

}  // namespace beamrl
