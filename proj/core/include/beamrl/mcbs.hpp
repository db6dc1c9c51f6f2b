#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "beamrl/env.hpp"
#include "beamrl/rng.hpp"
#include "beamrl/td3.hpp"
#include "beamrl/vec.hpp"

namespace beamrl {

struct McbsConfig {
  int beam_width = 6;
  int rollout_depth = 3;          // 0 = score candidates by the critics alone
  int num_sims = 5;
  double beam_noise_sigma = -1.0; // negative = resolve to 0.2 * action_max
  bool adaptive = true;
  int saturation_window = 10;     // evaluations considered by the schedule
  double saturation_epsilon = 0.01;
  long min_beam_interval = 10;    // beam cadence in real steps once saturated

  void validate() const;
};

// One beam member: proposed action, its per-simulation returns, and their mean.
struct Candidate {
  Vector action;
  std::vector<double> returns;
  double score = 0.0;
};

// Separates real experience from planning cost so the simulator budget stays
// auditable. Rollout charges per planning call never exceed
// beam_width * num_sims * rollout_depth.
struct BudgetLedger {
  long real_env_steps = 0;
  long rollout_env_steps = 0;
  long actor_forwards = 0;
  long critic_forwards = 0;
};

using PolicyFn = std::function<Vector(const Vector& obs)>;
// value used to bootstrap rollout tails; production wiring is the minimum of
// the twin critics
using BootstrapFn = std::function<double(const Vector& obs, const Vector& action)>;

// beam_width actions clip(policy(obs) + eta), eta ~ N(0, sigma^2) per
// dimension, i.i.d. across candidates. The noise itself is not clipped.
std::vector<Vector> generate_beam(const PolicyFn& policy, const Vector& obs, int beam_width,
                                  double sigma, double action_max, RngStream& rng);

// Up to depth simulated steps from the snapshot on the scratch instance,
// discounting rewards by gamma per step; stops early at a terminal state
// (no bootstrap); otherwise adds the discounted bootstrap at the final
// state paired with the action freshly sampled there. depth 0 evaluates the
// bootstrap at the snapshot state for the proposed action directly.
double short_horizon(Env& scratch, const EnvSnapshot& snap, const Vector& first_action,
                     int depth, double gamma, double sigma, double action_max,
                     const PolicyFn& policy, const BootstrapFn& bootstrap, RngStream& rng,
                     BudgetLedger& ledger);

// Scores each candidate as the mean of num_sims independent rollouts, every
// rollout restored from the same snapshot and driven by its own derived rng
// substream (so a parallel execution would reduce to the same totals).
std::vector<Candidate> evaluate_candidates(Env& scratch, const EnvSnapshot& snap,
                                           std::vector<Vector> actions, int depth,
                                           int num_sims, double gamma, double sigma,
                                           double action_max, const PolicyFn& policy,
                                           const BootstrapFn& bootstrap,
                                           std::uint64_t rollout_seed, BudgetLedger& ledger);

// Index of the highest-scoring candidate; ties break toward the lowest
// generation index. Rejects empty lists and non-finite scores.
std::size_t select_action(std::span<const Candidate> candidates);

// True while evaluation returns are still improving (or after they slump
// below the running maximum by more than saturation_epsilon, relatively);
// false once the last saturation_window evaluations show relative
// improvement below saturation_epsilon.
bool saturation_schedule(std::span<const double> eval_means, const McbsConfig& cfg);

// Owns the scratch simulator used for rollouts so planning never touches the
// live episode.
class Planner {
 public:
  Planner(McbsConfig cfg, const Env& live_prototype);

  struct Decision {
    Vector action;
    bool beam_used = false;
  };

  // Beam path: snapshot -> generate -> evaluate -> select. Off-beam path
  // (degenerate beam, or saturated schedule away from the min_beam_interval
  // cadence): plain noisy policy action from explore_action.
  Decision plan(const Td3Agent& agent, const Env& live, long real_step,
                std::span<const double> eval_means, const Td3Config& td3_cfg,
                BudgetLedger& ledger, RngStream& beam_rng, RngStream& rollout_rng,
                RngStream& explore_rng);

  const McbsConfig& config() const { return cfg_; }

 private:
  McbsConfig cfg_;
  std::unique_ptr<Env> scratch_;
};

PolicyFn make_policy_fn(const Td3Agent& agent);
BootstrapFn make_twin_critic_bootstrap(const Td3Agent& agent);

}  // namespace beamrl
