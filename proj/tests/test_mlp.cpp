#include <doctest.h>

#include <cmath>

#include "beamrl/mlp.hpp"
#include "support/oracles.hpp"

using namespace beamrl;
using namespace beamrl::testing;

namespace {

Mlp random_net(RngStream& rng, int max_layers = 3, int max_units = 8) {
  const int layers = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(max_layers)));
  std::vector<std::size_t> sizes;
  for (int i = 0; i <= layers; ++i) {
    sizes.push_back(1 + rng.index(static_cast<std::size_t>(max_units)));
  }
  const Activation out = rng.uniform() < 0.5 ? Activation::Identity : Activation::Tanh;
  Mlp net = make_mlp(sizes, Activation::Relu, out);
  init_uniform_fan_in(net, rng);
  return net;
}

Vector random_input(RngStream& rng, std::size_t n) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

TEST_CASE("forward: zero parameters with identity output give zeros") {
  Mlp net = make_mlp({3, 4, 2}, Activation::Relu, Activation::Identity);
  const Vector out = mlp_forward(net, {0.5, -1.2, 3.0});
  REQUIRE(out.size() == 2);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("forward: 1-1 affine map") {
  Mlp net = make_mlp({1, 1}, Activation::Identity, Activation::Identity);
  net.weights[0] = {2.0};
  net.biases[0] = {1.0};
  const Vector out = mlp_forward(net, {3.0});
  CHECK(out[0] == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("forward: bounded output of zero pre-activation is zero") {
  Mlp net = make_mlp({1, 1}, Activation::Relu, Activation::Tanh);
  const Vector out = mlp_forward(net, {5.0});
  CHECK(out[0] == 0.0);
}

TEST_CASE("forward: bounded outputs stay strictly inside (-1, 1)") {
  Mlp net = make_mlp({1, 1}, Activation::Identity, Activation::Tanh);
  net.weights[0] = {1000.0};  // deep saturation
  const Vector out = mlp_forward(net, {1000.0});
  CHECK(out[0] < 1.0);
  CHECK(out[0] > 0.99);
}

TEST_CASE("forward: dimension mismatch names expected and actual lengths") {
  Mlp net = make_mlp({3, 2}, Activation::Relu, Activation::Identity);
  try {
    mlp_forward(net, {1.0, 2.0});
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("3") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
}

TEST_CASE("forward: deterministic for fixed parameters and input") {
  RngStream rng(11);
  Mlp net = random_net(rng);
  const Vector input = random_input(rng, net.input_size());
  const Vector a = mlp_forward(net, input);
  const Vector b = mlp_forward(net, input);
  CHECK(a == b);  // bitwise
}

TEST_CASE("backward: zero upstream gives zero gradients") {
  RngStream rng(12);
  Mlp net = random_net(rng);
  const Vector input = random_input(rng, net.input_size());
  const auto [grads, input_grad] = mlp_backward(net, input, Vector(net.output_size(), 0.0));
  for (const auto& layer : grads.weights) {
    for (double g : layer) CHECK(g == 0.0);
  }
  for (const auto& layer : grads.biases) {
    for (double g : layer) CHECK(g == 0.0);
  }
  for (double g : input_grad) CHECK(g == 0.0);
}

TEST_CASE("backward: hand-differentiated 1-1 identity net") {
  // y = w x + b with w=2, b arbitrary; d y/d w = x = 3, d y/d b = 1, d y/d x = w = 2
  Mlp net = make_mlp({1, 1}, Activation::Identity, Activation::Identity);
  net.weights[0] = {2.0};
  net.biases[0] = {0.0};
  const auto [grads, input_grad] = mlp_backward(net, {3.0}, {1.0});
  CHECK(grads.weights[0][0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(grads.biases[0][0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(input_grad[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("backward: upstream shape mismatch rejected") {
  Mlp net = make_mlp({2, 3}, Activation::Relu, Activation::Identity);
  CHECK_THROWS_AS(mlp_backward(net, {1.0, 2.0}, {1.0}), ShapeError);
}

TEST_CASE("backward: matches central finite differences on random small nets") {
  RngStream rng(13);
  int checked = 0;
  while (checked < 25) {
    Mlp net = random_net(rng);
    Vector input = random_input(rng, net.input_size());
    if (near_relu_kink(net, input)) continue;  // resample away from kinks
    Vector upstream = random_input(rng, net.output_size());
    const FdReport report = finite_difference_check(net, input, upstream);
    INFO("worst component: " << report.worst);
    CHECK(report.max_rel_error < 1e-4);
    ++checked;
  }
}

TEST_CASE("property: shapes are preserved across random architectures") {
  RngStream rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    Mlp net = random_net(rng, 3, 8);
    for (std::size_t k = 0; k < net.num_layers(); ++k) {
      CHECK(net.weights[k].size() == net.layer_sizes[k + 1] * net.layer_sizes[k]);
      CHECK(net.biases[k].size() == net.layer_sizes[k + 1]);
    }
    const Vector input = random_input(rng, net.input_size());
    const Vector out = mlp_forward(net, input);
    CHECK(out.size() == net.output_size());
    CHECK(all_finite(out));
    if (net.output_activation == Activation::Tanh) {
      for (double y : out) {
        CHECK(y > -1.0);
        CHECK(y < 1.0);
      }
    }
    const auto [grads, input_grad] = mlp_backward(net, input, Vector(net.output_size(), 1.0));
    REQUIRE(grads.weights.size() == net.num_layers());
    for (std::size_t k = 0; k < net.num_layers(); ++k) {
      CHECK(grads.weights[k].size() == net.weights[k].size());
      CHECK(grads.biases[k].size() == net.biases[k].size());
    }
    CHECK(input_grad.size() == net.input_size());
  }
}

TEST_CASE("make_mlp rejects degenerate architectures") {
  CHECK_THROWS_AS(make_mlp({3}, Activation::Relu, Activation::Identity), ShapeError);
  CHECK_THROWS_AS(make_mlp({3, 0, 1}, Activation::Relu, Activation::Identity), ShapeError);
}
