#include "beamrl/mlp.hpp"

#include <cassert>
#include <cmath>

namespace beamrl {

namespace {

// tanh(20) rounds to 1.0 in double; clamp keeps bounded outputs strictly
// inside (-1, 1). The derivative 1 - t^2 is ~2e-16 there, consistent with
// the clamp.
constexpr double kTanhClamp = 0.99999999999999989;  // nextafter(1.0, 0.0)

inline double activate(Activation act, double x) {
  switch (act) {
    case Activation::Identity: return x;
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Tanh: return clip(std::tanh(x), -kTanhClamp, kTanhClamp);
  }
  return x;
}

// derivative expressed through the activated value where possible
inline double activate_grad(Activation act, double pre, double post) {
  switch (act) {
    case Activation::Identity: return 1.0;
    case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - post * post;
  }
  return 1.0;
}

}  // namespace

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].size() + biases[k].size();
  return n;
}

void Gradients::scale(double s) {
  for (auto& w : weights)
    for (double& x : w) x *= s;
  for (auto& b : biases)
    for (double& x : b) x *= s;
}

void Gradients::zero() {
  for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

Mlp make_mlp(std::vector<std::size_t> layer_sizes, Activation hidden, Activation output) {
  if (layer_sizes.size() < 2) throw ShapeError("Mlp needs at least input and output sizes");
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw ShapeError("Mlp layer sizes must be positive");
  }
  Mlp net;
  net.layer_sizes = std::move(layer_sizes);
  net.hidden_activation = hidden;
  net.output_activation = output;
  const std::size_t layers = net.layer_sizes.size() - 1;
  net.weights.resize(layers);
  net.biases.resize(layers);
  for (std::size_t k = 0; k < layers; ++k) {
    net.weights[k].assign(net.layer_sizes[k + 1] * net.layer_sizes[k], 0.0);
    net.biases[k].assign(net.layer_sizes[k + 1], 0.0);
  }
  return net;
}

void init_uniform_fan_in(Mlp& net, RngStream& rng) {
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.layer_sizes[k]));
    for (double& w : net.weights[k]) w = rng.uniform(-bound, bound);
    for (double& b : net.biases[k]) b = rng.uniform(-bound, bound);
  }
}

bool same_architecture(const Mlp& a, const Mlp& b) {
  return a.layer_sizes == b.layer_sizes && a.hidden_activation == b.hidden_activation &&
         a.output_activation == b.output_activation;
}

Gradients zero_gradients(const Mlp& net) {
  Gradients g;
  g.weights.resize(net.num_layers());
  g.biases.resize(net.num_layers());
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    g.weights[k].assign(net.weights[k].size(), 0.0);
    g.biases[k].assign(net.biases[k].size(), 0.0);
  }
  return g;
}

Vector mlp_forward(const Mlp& net, const Vector& input) {
  MlpWorkspace ws;
  return mlp_forward(net, input, ws);
}

const Vector& mlp_forward(const Mlp& net, const Vector& input, MlpWorkspace& ws) {
  require_len(input, net.input_size(), "mlp_forward input");
  const std::size_t layers = net.num_layers();
  ws.pre.resize(layers);
  ws.post.resize(layers);

  const Vector* x = &input;
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t in = net.layer_sizes[k];
    const std::size_t out = net.layer_sizes[k + 1];
    const Activation act = (k + 1 == layers) ? net.output_activation : net.hidden_activation;
    ws.pre[k].resize(out);
    ws.post[k].resize(out);
    const double* w = net.weights[k].data();
    for (std::size_t i = 0; i < out; ++i) {
      double acc = net.biases[k][i];
      const double* row = w + i * in;
      const double* xv = x->data();
      for (std::size_t j = 0; j < in; ++j) acc += row[j] * xv[j];
      ws.pre[k][i] = acc;
      ws.post[k][i] = activate(act, acc);
    }
    x = &ws.post[k];
  }
  return ws.post.back();
}

std::pair<Gradients, Vector> mlp_backward(const Mlp& net, const Vector& input,
                                          const Vector& upstream) {
  Gradients grads = zero_gradients(net);
  Vector input_grad;
  MlpWorkspace ws;
  mlp_backward_acc(net, input, upstream, grads, input_grad, ws);
  return {std::move(grads), std::move(input_grad)};
}

namespace {

void backward_impl(const Mlp& net, const Vector& input, const Vector& upstream,
                   Gradients* acc, Vector& input_grad, MlpWorkspace& ws) {
  require_len(upstream, net.output_size(), "mlp_backward upstream");
  mlp_forward(net, input, ws);  // refresh cached activations

  const std::size_t layers = net.num_layers();
  ws.delta.assign(upstream.begin(), upstream.end());
  for (std::size_t ri = 0; ri < layers; ++ri) {
    const std::size_t k = layers - 1 - ri;
    const std::size_t in = net.layer_sizes[k];
    const std::size_t out = net.layer_sizes[k + 1];
    const Activation act = (k + 1 == layers) ? net.output_activation : net.hidden_activation;

    // delta through the activation of layer k
    for (std::size_t i = 0; i < out; ++i) {
      ws.delta[i] *= activate_grad(act, ws.pre[k][i], ws.post[k][i]);
    }

    if (acc != nullptr) {
      const Vector& layer_in = (k == 0) ? input : ws.post[k - 1];
      double* gw = acc->weights[k].data();
      for (std::size_t i = 0; i < out; ++i) {
        const double d = ws.delta[i];
        acc->biases[k][i] += d;
        double* grow = gw + i * in;
        const double* xv = layer_in.data();
        for (std::size_t j = 0; j < in; ++j) grow[j] += d * xv[j];
      }
    }

    // propagate to previous layer: delta_next = W^T * delta
    ws.delta_next.assign(in, 0.0);
    const double* w = net.weights[k].data();
    for (std::size_t i = 0; i < out; ++i) {
      const double d = ws.delta[i];
      const double* row = w + i * in;
      double* dn = ws.delta_next.data();
      for (std::size_t j = 0; j < in; ++j) dn[j] += d * row[j];
    }
    ws.delta.swap(ws.delta_next);
  }
  input_grad.assign(ws.delta.begin(), ws.delta.end());
}

}  // namespace

void mlp_backward_acc(const Mlp& net, const Vector& input, const Vector& upstream,
                      Gradients& acc, Vector& input_grad, MlpWorkspace& ws) {
  backward_impl(net, input, upstream, &acc, input_grad, ws);
}

void mlp_backward_input(const Mlp& net, const Vector& input, const Vector& upstream,
                        Vector& input_grad, MlpWorkspace& ws) {
  backward_impl(net, input, upstream, nullptr, input_grad, ws);
}

}  // namespace beamrl
