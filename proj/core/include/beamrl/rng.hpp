#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace beamrl {

// splitmix64; used to derive substream seeds from a master seed so that
// consuming one stream never perturbs another.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name) {
  return mix64(master ^ hash_name(stream_name));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name,
                                 std::uint64_t index) {
  return mix64(derive_seed(master, stream_name) + mix64(index));
}

// A seeded random stream. Draw order is part of the contract: runs with the
// same seed replay the same sequence within one implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // standard normal
  double gauss() { return normal_(engine_); }

  // uniform index in [0, n)
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace beamrl
