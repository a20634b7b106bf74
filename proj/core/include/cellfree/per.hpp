#pragma once

#include <cstddef>
#include <vector>

#include "cellfree/rng.hpp"

namespace cellfree {

/// N-step slice of one actor's stream: N (state, action, reward) triples
/// plus the state observed after the window.
struct Trajectory {
  std::vector<std::vector<double>> s;
  std::vector<std::vector<double>> a;
  std::vector<double> r;
  std::vector<double> s_terminal;
};

/// Ring buffer with proportional prioritized sampling backed by a segment
/// tree. New entries adopt the current maximum priority; priorities are
/// floored so sampling never starves.
class PrioritizedBuffer {
 public:
  explicit PrioritizedBuffer(size_t capacity, double priority_floor = 1e-3);

  size_t capacity() const { return capacity_; }
  size_t size() const { return size_; }

  /// Returns the slot the trajectory landed in.
  size_t push(Trajectory t);

  const Trajectory& at(size_t slot) const { return items_[slot]; }
  double priority(size_t slot) const;

  struct Sample {
    std::vector<size_t> slots;
    std::vector<double> weights;  // (size * P_i)^{-1}
  };

  /// Draws n slots with probability proportional to priority. Throws
  /// ContractError if fewer than n items are stored.
  Sample sample(size_t n, Rng& rng) const;

  void update_priority(size_t slot, double priority);

 private:
  void tree_set_(size_t slot, double value);
  size_t tree_find_(double mass) const;

  size_t capacity_;
  size_t leaves_;  // power-of-two padding
  double floor_;
  size_t size_ = 0;
  size_t next_ = 0;
  std::vector<Trajectory> items_;
  std::vector<double> sum_;  // segment tree over priorities
  double max_priority_ = 1.0;
};

}  // namespace cellfree
