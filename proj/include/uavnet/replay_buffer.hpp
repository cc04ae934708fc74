#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace uavnet {

struct Transition {
  std::vector<double> state;
  std::vector<double> action;  // raw, in [-1, 1]
  double reward = 0.0;
  std::vector<double> next_state;
  /// Discrete choices for agents with factored heads; empty otherwise.
  std::vector<int> choices;
};

/// Capacity-bounded FIFO store with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Index 0 is the oldest surviving transition.
  const Transition& at(std::size_t i) const;

  /// `count` indices drawn uniformly with replacement.
  std::vector<std::size_t> sample_indices(std::size_t count, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot the next push overwrites once full
  std::vector<Transition> items_;
};

}  // namespace uavnet
