#include "beamrl/replay.hpp"

#include <cmath>
#include <stdexcept>

namespace beamrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim)
    : capacity_(capacity), obs_dim_(obs_dim), action_dim_(action_dim) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  storage_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  require_len(t.state, obs_dim_, "replay push state");
  require_len(t.action, action_dim_, "replay push action");
  require_len(t.next_state, obs_dim_, "replay push next_state");
  if (!all_finite(t.state) || !all_finite(t.action) || !all_finite(t.next_state) ||
      !std::isfinite(t.reward)) {
    throw std::invalid_argument("replay push: non-finite transition");
  }
  if (size_ < capacity_) {
    storage_.push_back(std::move(t));
    size_ += 1;
  } else {
    storage_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

void ReplayBuffer::sample(std::size_t batch_size, RngStream& rng,
                          std::vector<Transition>& out) const {
  if (batch_size == 0) throw std::invalid_argument("replay sample: batch_size must be >= 1");
  if (size_ == 0) {
    // sampling is with replacement, so any non-empty buffer can serve any
    // batch size
    throw std::runtime_error("replay sample: buffer is empty (requested batch of " +
                             std::to_string(batch_size) + ")");
  }
  out.clear();
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    out.push_back(storage_[rng.index(size_)]);
  }
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size, RngStream& rng) const {
  std::vector<Transition> out;
  sample(batch_size, rng, out);
  return out;
}

void ReplayBuffer::sample_refs(std::size_t batch_size, RngStream& rng,
                               std::vector<const Transition*>& out) const {
  if (batch_size == 0) throw std::invalid_argument("replay sample: batch_size must be >= 1");
  if (size_ < batch_size) {
    throw std::runtime_error("replay sample: requested batch of " + std::to_string(batch_size) +
                             " but buffer holds " + std::to_string(size_));
  }
  out.clear();
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    out.push_back(&storage_[rng.index(size_)]);
  }
}

const Transition& ReplayBuffer::at(std::size_t logical_index) const {
  if (logical_index >= size_) throw std::out_of_range("ReplayBuffer::at");
  if (size_ < capacity_) return storage_[logical_index];
  return storage_[(cursor_ + logical_index) % capacity_];
}

}  // namespace beamrl
