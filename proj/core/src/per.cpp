#include "cellfree/per.hpp"

#include <algorithm>

#include "cellfree/errors.hpp"

namespace cellfree {

PrioritizedBuffer::PrioritizedBuffer(size_t capacity, double priority_floor)
    : capacity_(capacity), floor_(priority_floor) {
  if (capacity == 0) throw ConfigError("prioritized buffer capacity must be > 0");
  if (priority_floor <= 0.0) throw ConfigError("priority floor must be > 0");
  leaves_ = 1;
  while (leaves_ < capacity_) leaves_ <<= 1;
  sum_.assign(2 * leaves_, 0.0);
  items_.resize(capacity_);
}

void PrioritizedBuffer::tree_set_(size_t slot, double value) {
  size_t i = leaves_ + slot;
  sum_[i] = value;
  for (i >>= 1; i >= 1; i >>= 1) {
    sum_[i] = sum_[2 * i] + sum_[2 * i + 1];
    if (i == 1) break;
  }
}

size_t PrioritizedBuffer::tree_find_(double mass) const {
  size_t i = 1;
  while (i < leaves_) {
    const double left = sum_[2 * i];
    if (mass < left) {
      i = 2 * i;
    } else {
      mass -= left;
      i = 2 * i + 1;
    }
  }
  return std::min(i - leaves_, size_ - 1);
}

size_t PrioritizedBuffer::push(Trajectory t) {
  const size_t slot = next_;
  items_[slot] = std::move(t);
  tree_set_(slot, std::max(max_priority_, floor_));
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
  return slot;
}

double PrioritizedBuffer::priority(size_t slot) const { return sum_[leaves_ + slot]; }

PrioritizedBuffer::Sample PrioritizedBuffer::sample(size_t n, Rng& rng) const {
  if (size_ < n) throw ContractError("prioritized buffer holds fewer items than requested");
  const double total = sum_[1];
  if (total <= 0.0) throw ContractError("prioritized buffer has zero total priority");

  Sample s;
  s.slots.resize(n);
  s.weights.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const size_t slot = tree_find_(rng.uniform() * total);
    s.slots[i] = slot;
    const double prob = priority(slot) / total;
    s.weights[i] = 1.0 / (static_cast<double>(size_) * prob);
  }
  return s;
}

void PrioritizedBuffer::update_priority(size_t slot, double p) {
  if (slot >= size_) throw ContractError("priority update for an empty slot");
  const double v = std::max(p, floor_);
  max_priority_ = std::max(max_priority_, v);
  tree_set_(slot, v);
}

}  // namespace cellfree
