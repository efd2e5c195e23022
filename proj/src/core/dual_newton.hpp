#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fkflow {

// Callbacks describing a Gibbs-type dual: the log partition function of the
// tilted measure, the expectations of the constrained observables, and their
// covariance (the exact Hessian for exponential families).
struct DualModel {
  std::function<double(std::span<const double>)> log_partition;
  std::function<std::vector<double>(std::span<const double>)> expectations;
  std::function<std::vector<double>(std::span<const double>)> covariance;  // k x k row-major
};

struct DualOptions {
  double grad_tolerance = 1e-10;
  std::size_t max_iterations = 200;
};

struct DualSolution {
  std::vector<double> multipliers;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  // Dual objective after each accepted step (decreasing under backtracking).
  std::vector<double> objective_trace;
};

// Minimizes D(w) = log Z(w) + w . targets by damped Newton with Armijo
// backtracking; gradient = targets - E_w[J], Hessian = Cov_w[J]. Falls back
// to a gradient step when the covariance is singular. Throws InfeasibleError
// when the gradient norm does not reach tolerance within the iteration cap.
DualSolution minimize_dual(const DualModel& model, std::span<const double> targets,
                           const DualOptions& options = {});

// Solves the SPD system a x = b in place via LDL^T; returns false when a
// pivot degenerates (matrix not positive definite).
bool solve_spd(std::size_t k, std::span<const double> a_row_major, std::span<const double> b,
               std::span<double> x);

}  // namespace fkflow
