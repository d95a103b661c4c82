#pragma once

#include <vector>

#include "smmcts/game.hpp"

namespace smmcts {

struct MaximinResult {
  double value = 0.0;
  std::vector<double> strategy;
};

// Maximin strategy for the row player of a zero-sum payoff matrix: maximizes
// min_j sum_i sigma_i * M(i, j). Dense tableau simplex (Bland's rule) on the
// standard positive-shift formulation; exact enough for the tiny matrices
// this library deals in.
MaximinResult maximin_row(const MatrixGame& m);

}  // namespace smmcts
