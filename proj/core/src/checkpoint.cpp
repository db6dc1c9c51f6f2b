#include "beamrl/checkpoint.hpp"

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace beamrl {

namespace {

constexpr std::uint32_t kMlpTag = 0x314e4c4du;  // "MLN1"

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: unexpected end of stream");
  return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& in, std::vector<double>& v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint: unexpected end of stream");
}

}  // namespace

void write_mlp(std::ostream& out, const Mlp& net) {
  write_pod(out, kMlpTag);
  write_pod(out, static_cast<std::uint32_t>(net.layer_sizes.size()));
  for (std::size_t s : net.layer_sizes) write_pod(out, static_cast<std::uint64_t>(s));
  write_pod(out, static_cast<std::uint8_t>(net.hidden_activation));
  write_pod(out, static_cast<std::uint8_t>(net.output_activation));
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    write_doubles(out, net.weights[k]);
    write_doubles(out, net.biases[k]);
  }
}

Mlp read_mlp(std::istream& in) {
  if (read_pod<std::uint32_t>(in) != kMlpTag) {
    throw std::runtime_error("checkpoint: bad network record tag");
  }
  const auto n_sizes = read_pod<std::uint32_t>(in);
  if (n_sizes < 2) throw std::runtime_error("checkpoint: corrupt layer count");
  std::vector<std::size_t> sizes(n_sizes);
  for (auto& s : sizes) s = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
  const auto hidden = static_cast<Activation>(read_pod<std::uint8_t>(in));
  const auto output = static_cast<Activation>(read_pod<std::uint8_t>(in));
  Mlp net = make_mlp(std::move(sizes), hidden, output);
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    read_doubles(in, net.weights[k]);
    read_doubles(in, net.biases[k]);
  }
  return net;
}

void write_adam_state(std::ostream& out, const AdamState& state) {
  write_pod(out, static_cast<std::uint64_t>(state.step));
  for (std::size_t k = 0; k < state.m_weights.size(); ++k) {
    write_doubles(out, state.m_weights[k]);
    write_doubles(out, state.v_weights[k]);
    write_doubles(out, state.m_biases[k]);
    write_doubles(out, state.v_biases[k]);
  }
}

AdamState read_adam_state(std::istream& in, const Mlp& shapes) {
  AdamState state = make_adam_state(shapes);
  state.step = read_pod<std::uint64_t>(in);
  for (std::size_t k = 0; k < state.m_weights.size(); ++k) {
    read_doubles(in, state.m_weights[k]);
    read_doubles(in, state.v_weights[k]);
    read_doubles(in, state.m_biases[k]);
    read_doubles(in, state.v_biases[k]);
  }
  return state;
}

}  // namespace beamrl
