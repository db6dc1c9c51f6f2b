#pragma once

#include <cstdint>
#include <vector>

#include "beamrl/mlp.hpp"

namespace beamrl {

// Adam moment estimates, shapes mirroring the owning Mlp.
struct AdamState {
  std::vector<std::vector<double>> m_weights, v_weights;
  std::vector<std::vector<double>> m_biases, v_biases;
  std::uint64_t step = 0;

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;
};

AdamState make_adam_state(const Mlp& net);

// One Adam step in the descent direction of grads. Rejects non-finite
// gradient components, reporting the layer index.
void adam_step(Mlp& net, const Gradients& grads, AdamState& state, double lr);

// target <- tau * online + (1 - tau) * target, elementwise
void polyak_update(Mlp& target, const Mlp& online, double tau);

}  // namespace beamrl
