#include "beamrl/env.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beamrl {

namespace {

void check_action(const Env& env, const Vector& action) {
  require_len(action, env.spec().action_dim, "env step action");
  if (!all_finite(action)) throw std::invalid_argument("env step: non-finite action");
}

void check_restore(const Env& env, const EnvSnapshot& snap, std::size_t state_len) {
  if (snap.env_name != env.spec().name) {
    throw std::invalid_argument("restore: snapshot from '" + snap.env_name +
                                "' cannot restore '" + env.spec().name + "'");
  }
  if (snap.state.size() != state_len) {
    throw std::invalid_argument("restore: corrupt snapshot state");
  }
}

double wrap_angle(double theta) {
  // into [-pi, pi]
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta + std::numbers::pi, two_pi);
  if (w < 0) w += two_pi;
  return w - std::numbers::pi;
}

// 1-D track: s' = clip(s + 0.1 a, -5, 5), reward -s'^2. No terminal states.
class LinearTrack final : public Env {
 public:
  explicit LinearTrack(ResetMode mode) : mode_(mode) {
    spec_ = {"linear-track", 1, 1, 1.0, 200, 25.0};
  }

  const EnvSpec& spec() const override { return spec_; }

  Vector reset(RngStream& rng) override {
    s_ = (mode_ == ResetMode::Test) ? 1.0 : rng.uniform(-2.0, 2.0);
    steps_ = 0;
    return observe();
  }

  StepResult step(const Vector& action) override {
    check_action(*this, action);
    const double a = clip(action[0], -spec_.action_max, spec_.action_max);
    s_ = clip(s_ + 0.1 * a, -5.0, 5.0);
    steps_ += 1;
    return {observe(), -s_ * s_, false, steps_ >= spec_.max_episode_steps};
  }

  Vector observe() const override { return {s_}; }

  EnvSnapshot snapshot() const override { return {spec_.name, {s_}, steps_}; }

  void restore(const EnvSnapshot& snap) override {
    check_restore(*this, snap, 1);
    s_ = snap.state[0];
    steps_ = snap.step_count;
  }

  std::unique_ptr<Env> clone() const override { return std::make_unique<LinearTrack>(*this); }

 private:
  EnvSpec spec_;
  ResetMode mode_;
  double s_ = 0.0;
  long steps_ = 0;
};

// Point mass: x' = x + v dt, v' = v + a dt, reward -(x^2 + 0.1 v^2 + 0.01 a^2).
class DoubleIntegrator final : public Env {
 public:
  explicit DoubleIntegrator(ResetMode mode) : mode_(mode) {
    // |v| <= 15 and |x| <= 226 within an episode started from reset, so the
    // per-step reward magnitude stays below the (loose) bound.
    spec_ = {"double-integrator", 2, 1, 1.0, 300, 52000.0};
  }

  const EnvSpec& spec() const override { return spec_; }

  Vector reset(RngStream& rng) override {
    x_ = (mode_ == ResetMode::Test) ? 1.0 : rng.uniform(-1.0, 1.0);
    v_ = 0.0;
    steps_ = 0;
    return observe();
  }

  StepResult step(const Vector& action) override {
    check_action(*this, action);
    const double a = clip(action[0], -spec_.action_max, spec_.action_max);
    x_ = x_ + v_ * kDt;
    v_ = v_ + a * kDt;
    steps_ += 1;
    const double reward = -(x_ * x_ + 0.1 * v_ * v_ + 0.01 * a * a);
    return {observe(), reward, false, steps_ >= spec_.max_episode_steps};
  }

  Vector observe() const override { return {x_, v_}; }

  EnvSnapshot snapshot() const override { return {spec_.name, {x_, v_}, steps_}; }

  void restore(const EnvSnapshot& snap) override {
    check_restore(*this, snap, 2);
    x_ = snap.state[0];
    v_ = snap.state[1];
    steps_ = snap.step_count;
  }

  std::unique_ptr<Env> clone() const override {
    return std::make_unique<DoubleIntegrator>(*this);
  }

 private:
  static constexpr double kDt = 0.05;
  EnvSpec spec_;
  ResetMode mode_;
  double x_ = 0.0, v_ = 0.0;
  long steps_ = 0;
};

// Torque-limited swing-up. Semi-implicit Euler:
//   thdot' = clip(thdot + (3g/(2l) sin th + 3/(m l^2) u) dt, -8, 8)
//   th'    = th + thdot' dt
// reward -(wrap(th')^2 + 0.1 thdot'^2 + 0.001 u^2). No terminal states.
class PendulumSwingUp final : public Env {
 public:
  PendulumSwingUp() {
    // pi^2 + 0.1 * 64 + 0.001 * 4
    spec_ = {"pendulum-swingup", 3, 1, 2.0, 200, 16.2736};
  }

  const EnvSpec& spec() const override { return spec_; }

  Vector reset(RngStream& rng) override {
    theta_ = rng.uniform(-std::numbers::pi, std::numbers::pi);
    theta_dot_ = rng.uniform(-1.0, 1.0);
    steps_ = 0;
    return observe();
  }

  StepResult step(const Vector& action) override {
    check_action(*this, action);
    const double u = clip(action[0], -spec_.action_max, spec_.action_max);
    const double accel = 3.0 * kG / (2.0 * kL) * std::sin(theta_) + 3.0 / (kM * kL * kL) * u;
    theta_dot_ = clip(theta_dot_ + accel * kDt, -kMaxSpeed, kMaxSpeed);
    theta_ = theta_ + theta_dot_ * kDt;
    steps_ += 1;
    const double w = wrap_angle(theta_);
    const double reward = -(w * w + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);
    return {observe(), reward, false, steps_ >= spec_.max_episode_steps};
  }

  Vector observe() const override {
    return {std::cos(theta_), std::sin(theta_), theta_dot_};
  }

  EnvSnapshot snapshot() const override {
    return {spec_.name, {theta_, theta_dot_}, steps_};
  }

  void restore(const EnvSnapshot& snap) override {
    check_restore(*this, snap, 2);
    theta_ = snap.state[0];
    theta_dot_ = snap.state[1];
    steps_ = snap.step_count;
  }

  std::unique_ptr<Env> clone() const override {
    return std::make_unique<PendulumSwingUp>(*this);
  }

 private:
  static constexpr double kDt = 0.05;
  static constexpr double kG = 10.0;
  static constexpr double kM = 1.0;
  static constexpr double kL = 1.0;
  static constexpr double kMaxSpeed = 8.0;
  EnvSpec spec_;
  double theta_ = 0.0, theta_dot_ = 0.0;
  long steps_ = 0;
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& name, ResetMode mode) {
  if (name == "linear-track") return std::make_unique<LinearTrack>(mode);
  if (name == "double-integrator") return std::make_unique<DoubleIntegrator>(mode);
  if (name == "pendulum-swingup") return std::make_unique<PendulumSwingUp>();
  std::string known;
  for (const auto& n : env_names()) known += " " + n;
  throw std::invalid_argument("unknown environment '" + name + "'; known:" + known);
}

const std::vector<std::string>& env_names() {
  static const std::vector<std::string> names = {"linear-track", "double-integrator",
                                                 "pendulum-swingup"};
  return names;
}

}  // namespace beamrl
