#pragma once

#include <cstddef>
#include <vector>

#include "cellfree/errors.hpp"
#include "cellfree/rng.hpp"

namespace cellfree {

struct Experience {
  std::vector<double> s;
  std::vector<double> a;
  double r = 0.0;
  std::vector<double> s_next;
};

/// Fixed-capacity ring buffer with FIFO eviction and uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay capacity must be > 0");
  }

  size_t capacity() const { return capacity_; }
  size_t size() const { return items_.size(); }

  void push(Experience e) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(e));
    } else {
      items_[next_] = std::move(e);
      next_ = (next_ + 1) % capacity_;
    }
  }

  /// i-th oldest experience, i in [0, size).
  const Experience& operator[](size_t i) const { return items_[(next_ + i) % items_.size()]; }

  std::vector<size_t> sample_indices(size_t n, Rng& rng) const {
    if (size() == 0) throw ContractError("sampling from an empty replay buffer");
    std::vector<size_t> idx(n);
    for (auto& i : idx) i = static_cast<size_t>(rng.uniform() * static_cast<double>(size()));
    return idx;
  }

 private:
  size_t capacity_;
  size_t next_ = 0;  // oldest slot once full
  std::vector<Experience> items_;
};

}  // namespace cellfree
