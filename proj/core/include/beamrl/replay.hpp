#pragma once

#include <cstddef>
#include <vector>

#include "beamrl/rng.hpp"
#include "beamrl/vec.hpp"

namespace beamrl {

struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  bool terminal = false;  // genuine terminal only, not time-limit truncation
};

// Fixed-capacity FIFO ring with uniform sampling (with replacement).
// Single-writer: the training loop pushes and samples sequentially.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim);

  void push(Transition t);
  void sample(std::size_t batch_size, RngStream& rng, std::vector<Transition>& out) const;
  std::vector<Transition> sample(std::size_t batch_size, RngStream& rng) const;
  // copy-free variant for the update loop; same draw sequence as sample()
  void sample_refs(std::size_t batch_size, RngStream& rng,
                   std::vector<const Transition*>& out) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t logical_index) const;  // 0 = oldest stored

 private:
  std::size_t capacity_;
  std::size_t obs_dim_, action_dim_;
  std::vector<Transition> storage_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
};

}  // namespace beamrl
