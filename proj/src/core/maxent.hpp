#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "core/grid.hpp"

namespace fkflow {

struct MaxEntProblem {
  Grid grid;
  std::vector<std::function<double(double)>> constraints;
  std::vector<double> targets;
  // Reference measure; uniform on the grid when absent.
  std::optional<GridDensity> base;
};

struct MaxEntSolution {
  GridDensity density;
  std::vector<double> multipliers;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> dual_trace;
};

// Maximum-entropy density p proportional to base * exp(-multipliers . J)
// with the multipliers solving the convex dual, so the constraint
// expectations match the targets (gradient norm below 1e-10 at return).
MaxEntSolution maxent_density(const MaxEntProblem& problem);

}  // namespace fkflow
