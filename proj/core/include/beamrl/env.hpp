#pragma once

#include <memory>
#include <string>
#include <vector>

#include "beamrl/rng.hpp"
#include "beamrl/vec.hpp"

namespace beamrl {

struct EnvSpec {
  std::string name;
  std::size_t obs_dim = 0;
  std::size_t action_dim = 0;
  double action_max = 0.0;        // per-dimension symmetric bound
  long max_episode_steps = 0;
  double reward_bound = 0.0;      // |reward| never exceeds this in any step
};

// terminal marks a genuine terminal state; truncated marks the step limit.
// Only terminal masks the bootstrap in the critic target.
struct StepResult {
  Vector obs;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;

  bool done() const { return terminal || truncated; }
};

// Full simulator state capture. Restoring a snapshot and replaying the same
// action sequence reproduces the same outputs exactly.
struct EnvSnapshot {
  std::string env_name;
  std::vector<double> state;
  long step_count = 0;
};

enum class ResetMode {
  Train,  // randomized initial conditions drawn from the given stream
  Test,   // fixed initial conditions where the environment defines them
};

class Env {
 public:
  virtual ~Env() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual Vector reset(RngStream& rng) = 0;
  virtual StepResult step(const Vector& action) = 0;
  virtual Vector observe() const = 0;
  virtual EnvSnapshot snapshot() const = 0;
  virtual void restore(const EnvSnapshot& snap) = 0;
  virtual std::unique_ptr<Env> clone() const = 0;
};

std::unique_ptr<Env> make_env(const std::string& name, ResetMode mode);
const std::vector<std::string>& env_names();

}  // namespace beamrl
