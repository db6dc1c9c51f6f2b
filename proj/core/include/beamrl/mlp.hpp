#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "beamrl/rng.hpp"
#include "beamrl/vec.hpp"

namespace beamrl {

enum class Activation : std::uint8_t {
  Identity = 0,
  Relu = 1,
  Tanh = 2,  // odd bounded nonlinearity; outputs stay strictly inside (-1, 1)
};

// Fully-connected network parameters. weights[k] is row-major with shape
// (layer_sizes[k+1] x layer_sizes[k]); biases[k] has length layer_sizes[k+1].
// The hidden activation applies to all layers except the last, which uses
// output_activation. Values are immutable for inference purposes; the
// training loop is the single writer.
struct Mlp {
  std::vector<std::size_t> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  Activation hidden_activation = Activation::Relu;
  Activation output_activation = Activation::Identity;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t num_layers() const { return weights.size(); }
  std::size_t param_count() const;
};

// Per-layer parameter gradients, shapes mirroring the owning Mlp.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  void scale(double s);
  void zero();
};

Mlp make_mlp(std::vector<std::size_t> layer_sizes, Activation hidden, Activation output);

// uniform init over +-1/sqrt(fan_in) for both weights and biases
void init_uniform_fan_in(Mlp& net, RngStream& rng);

bool same_architecture(const Mlp& a, const Mlp& b);

Gradients zero_gradients(const Mlp& net);

// Scratch buffers so hot loops avoid per-call allocation.
struct MlpWorkspace {
  std::vector<std::vector<double>> pre;   // pre-activations per layer
  std::vector<std::vector<double>> post;  // activations per layer
  std::vector<double> delta;
  std::vector<double> delta_next;
};

Vector mlp_forward(const Mlp& net, const Vector& input);
const Vector& mlp_forward(const Mlp& net, const Vector& input, MlpWorkspace& ws);

// Gradients of the scalar dot(upstream, net(input)) with respect to
// parameters and input. The input gradient is what chains dQ/da into the
// actor update.
std::pair<Gradients, Vector> mlp_backward(const Mlp& net, const Vector& input,
                                          const Vector& upstream);

// Accumulating variant: adds parameter gradients into `acc` and returns the
// input gradient through `input_grad`.
void mlp_backward_acc(const Mlp& net, const Vector& input, const Vector& upstream,
                      Gradients& acc, Vector& input_grad, MlpWorkspace& ws);

// Input gradient only, skipping parameter-gradient accumulation.
void mlp_backward_input(const Mlp& net, const Vector& input, const Vector& upstream,
                        Vector& input_grad, MlpWorkspace& ws);

}  // namespace beamrl
