#pragma once

#include <vector>

#include "uavnet/neural.hpp"

namespace uavnet {

struct Assignment {
  std::vector<int> column_of;  // one entry per row
  double total_cost = 0.0;
};

/// Minimum-cost injective assignment of the rows of a K x M cost matrix to
/// columns (K <= M). Shortest augmenting paths with potentials, O(K^2 M).
Assignment hungarian_assign(const Matrix& cost);

}  // namespace uavnet
