#include "beamrl/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace beamrl {

namespace {

void check_finite(const std::vector<double>& g, std::size_t layer, const char* kind) {
  for (double x : g) {
    if (!std::isfinite(x)) {
      throw std::runtime_error("adam_step: non-finite " + std::string(kind) +
                               " gradient in layer " + std::to_string(layer));
    }
  }
}

void adam_update(std::vector<double>& params, const std::vector<double>& grads,
                 std::vector<double>& m, std::vector<double>& v, double lr,
                 double bc1, double bc2) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = AdamState::kBeta1 * m[i] + (1.0 - AdamState::kBeta1) * g;
    v[i] = AdamState::kBeta2 * v[i] + (1.0 - AdamState::kBeta2) * g * g;
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + AdamState::kEpsilon);
  }
}

}  // namespace

AdamState make_adam_state(const Mlp& net) {
  AdamState s;
  const std::size_t layers = net.num_layers();
  s.m_weights.resize(layers);
  s.v_weights.resize(layers);
  s.m_biases.resize(layers);
  s.v_biases.resize(layers);
  for (std::size_t k = 0; k < layers; ++k) {
    s.m_weights[k].assign(net.weights[k].size(), 0.0);
    s.v_weights[k].assign(net.weights[k].size(), 0.0);
    s.m_biases[k].assign(net.biases[k].size(), 0.0);
    s.v_biases[k].assign(net.biases[k].size(), 0.0);
  }
  return s;
}

void adam_step(Mlp& net, const Gradients& grads, AdamState& state, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("adam_step: lr must be positive");
  if (grads.weights.size() != net.num_layers()) {
    throw ShapeError("adam_step: gradient layer count mismatch");
  }
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    if (grads.weights[k].size() != net.weights[k].size() ||
        grads.biases[k].size() != net.biases[k].size()) {
      throw ShapeError("adam_step: gradient shape mismatch in layer " + std::to_string(k));
    }
    check_finite(grads.weights[k], k, "weight");
    check_finite(grads.biases[k], k, "bias");
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    adam_update(net.weights[k], grads.weights[k], state.m_weights[k], state.v_weights[k], lr,
                bc1, bc2);
    adam_update(net.biases[k], grads.biases[k], state.m_biases[k], state.v_biases[k], lr, bc1,
                bc2);
  }
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
  if (!same_architecture(target, online)) {
    throw ShapeError("polyak_update: architecture mismatch between target and online nets");
  }
  if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("polyak_update: tau outside [0,1]");
  for (std::size_t k = 0; k < target.num_layers(); ++k) {
    for (std::size_t i = 0; i < target.weights[k].size(); ++i) {
      target.weights[k][i] = tau * online.weights[k][i] + (1.0 - tau) * target.weights[k][i];
    }
    for (std::size_t i = 0; i < target.biases[k].size(); ++i) {
      target.biases[k][i] = tau * online.biases[k][i] + (1.0 - tau) * target.biases[k][i];
    }
  }
}

}  // namespace beamrl
