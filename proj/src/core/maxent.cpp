#include "core/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/dual_newton.hpp"
#include "core/errors.hpp"

namespace fkflow {

MaxEntSolution maxent_density(const MaxEntProblem& problem) {
  const Grid& grid = problem.grid;
  const std::size_t k = problem.constraints.size();
  require(problem.targets.size() == k, "target count does not match constraint count");
  for (double c : problem.targets) require_finite(c, "constraint target");

  // Tabulate constraints and the quadrature-weighted base measure.
  std::vector<double> base(grid.n, 1.0 / (grid.hi - grid.lo));
  if (problem.base) {
    require(problem.base->grid() == grid, "base measure grid does not match problem grid");
    base = problem.base->values();
  }
  std::vector<double> weight(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double trapz = (j == 0 || j + 1 == grid.n) ? 0.5 : 1.0;
    weight[j] = trapz * grid.dx() * base[j];
  }
  std::vector<std::vector<double>> obs(k, std::vector<double>(grid.n));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < grid.n; ++j) {
      obs[i][j] = problem.constraints[i](grid.point(j));
      require_finite(obs[i][j], "constraint value on grid");
    }

  // Tilted probabilities over grid nodes, max-shifted for stability.
  auto node_probs = [&](std::span<const double> w, double* log_z) {
    std::vector<double> exponent(grid.n, 0.0);
    double max_e = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.n; ++j) {
      double e = 0.0;
      for (std::size_t i = 0; i < k; ++i) e -= w[i] * obs[i][j];
      exponent[j] = e;
      max_e = std::max(max_e, e);
    }
    std::vector<double> p(grid.n);
    double z = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
      p[j] = weight[j] * std::exp(exponent[j] - max_e);
      z += p[j];
    }
    require(z > 0.0 && std::isfinite(z), "degenerate tilted measure");
    for (double& v : p) v /= z;
    if (log_z) *log_z = max_e + std::log(z);
    return p;
  };

  DualModel model;
  model.log_partition = [&](std::span<const double> w) {
    double log_z = 0.0;
    node_probs(w, &log_z);
    return log_z;
  };
  model.expectations = [&](std::span<const double> w) {
    const auto p = node_probs(w, nullptr);
    std::vector<double> e(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < grid.n; ++j) e[i] += p[j] * obs[i][j];
    return e;
  };
  model.covariance = [&](std::span<const double> w) {
    const auto p = node_probs(w, nullptr);
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < grid.n; ++j) mean[i] += p[j] * obs[i][j];
    std::vector<double> cov(k * k, 0.0);
    for (std::size_t j = 0; j < grid.n; ++j)
      for (std::size_t a = 0; a < k; ++a) {
        const double da = obs[a][j] - mean[a];
        for (std::size_t b = a; b < k; ++b)
          cov[a * k + b] += p[j] * da * (obs[b][j] - mean[b]);
      }
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < a; ++b) cov[a * k + b] = cov[b * k + a];
    return cov;
  };

  DualSolution dual = minimize_dual(model, problem.targets);

  // Density values: node probabilities divided by their quadrature weight.
  const auto p = node_probs(dual.multipliers, nullptr);
  std::vector<double> values(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double trapz = (j == 0 || j + 1 == grid.n) ? 0.5 : 1.0;
    values[j] = p[j] / (trapz * grid.dx());
  }
  return MaxEntSolution{GridDensity::normalized(grid, std::move(values)),
                        std::move(dual.multipliers), dual.iterations, dual.grad_norm,
                        std::move(dual.objective_trace)};
}

}  // namespace fkflow
