#include "core/dual_newton.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace fkflow {

bool solve_spd(std::size_t k, std::span<const double> a_row_major, std::span<const double> b,
               std::span<double> x) {
  require(a_row_major.size() == k * k && b.size() == k && x.size() == k,
          "solve_spd: size mismatch");
  std::vector<double> l(k * k, 0.0);
  std::vector<double> d(k, 0.0);
  double scale = 0.0;
  for (double v : a_row_major) scale = std::max(scale, std::abs(v));
  const double pivot_floor = std::max(scale, 1.0) * 1e-14;

  for (std::size_t j = 0; j < k; ++j) {
    double dj = a_row_major[j * k + j];
    for (std::size_t m = 0; m < j; ++m) dj -= l[j * k + m] * l[j * k + m] * d[m];
    if (!(dj > pivot_floor)) return false;
    d[j] = dj;
    l[j * k + j] = 1.0;
    for (std::size_t i = j + 1; i < k; ++i) {
      double v = a_row_major[i * k + j];
      for (std::size_t m = 0; m < j; ++m) v -= l[i * k + m] * l[j * k + m] * d[m];
      l[i * k + j] = v / dj;
    }
  }
  // Forward solve L y = b, then D z = y, then L^T x = z.
  std::vector<double> y(k);
  for (std::size_t i = 0; i < k; ++i) {
    double v = b[i];
    for (std::size_t m = 0; m < i; ++m) v -= l[i * k + m] * y[m];
    y[i] = v;
  }
  for (std::size_t i = 0; i < k; ++i) y[i] /= d[i];
  for (std::size_t i = k; i-- > 0;) {
    double v = y[i];
    for (std::size_t m = i + 1; m < k; ++m) v -= l[m * k + i] * x[m];
    x[i] = v;
  }
  return true;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double linf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

DualSolution minimize_dual(const DualModel& model, std::span<const double> targets,
                           const DualOptions& options) {
  const std::size_t k = targets.size();
  DualSolution sol;
  sol.multipliers.assign(k, 0.0);
  if (k == 0) return sol;

  auto objective = [&](std::span<const double> w) {
    return model.log_partition(w) + dot(w, targets);
  };

  double current = objective(sol.multipliers);
  sol.objective_trace.push_back(current);
  std::vector<double> direction(k), trial(k);

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    const std::vector<double> expect = model.expectations(sol.multipliers);
    require(expect.size() == k, "dual model returned wrong expectation count");
    std::vector<double> grad(k);
    for (std::size_t i = 0; i < k; ++i) grad[i] = targets[i] - expect[i];
    sol.grad_norm = linf(grad);
    sol.iterations = iter;
    if (sol.grad_norm < options.grad_tolerance) return sol;

    const std::vector<double> hess = model.covariance(sol.multipliers);
    bool newton_ok = solve_spd(k, hess, grad, direction);
    if (newton_ok) {
      for (double& v : direction) v = -v;
      // Guard against a non-descent direction from a near-singular Hessian.
      if (dot(grad, direction) >= 0.0) newton_ok = false;
    }
    if (!newton_ok)
      for (std::size_t i = 0; i < k; ++i) direction[i] = -grad[i];

    const double slope = dot(grad, direction);
    // Below this, the predicted decrease is lost to roundoff in the
    // objective; take the plain Newton step and let the gradient tolerance
    // decide convergence (the quadratic endgame no longer moves D).
    const double noise = 1e-14 * (1.0 + std::abs(current));
    if (slope >= -noise) {
      for (std::size_t i = 0; i < k; ++i) trial[i] = sol.multipliers[i] + direction[i];
      const double value = objective(trial);
      if (std::isfinite(value)) {
        sol.multipliers = trial;
        current = value;
        sol.objective_trace.push_back(current);
        continue;
      }
    }
    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-14) {
      for (std::size_t i = 0; i < k; ++i) trial[i] = sol.multipliers[i] + alpha * direction[i];
      const double value = objective(trial);
      if (std::isfinite(value) && value <= current + 1e-4 * alpha * slope + noise) {
        sol.multipliers = trial;
        current = value;
        sol.objective_trace.push_back(current);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted)
      throw InfeasibleError(
          "dual line search stalled after " + std::to_string(iter) +
              " iterations (gradient norm " + std::to_string(sol.grad_norm) +
              "); targets are infeasible or on the boundary of the attainable set",
          sol.grad_norm);
  }

  {
    const std::vector<double> expect = model.expectations(sol.multipliers);
    std::vector<double> grad(k);
    for (std::size_t i = 0; i < k; ++i) grad[i] = targets[i] - expect[i];
    sol.grad_norm = linf(grad);
  }
  if (sol.grad_norm < options.grad_tolerance) {
    sol.iterations = options.max_iterations;
    return sol;
  }
  throw InfeasibleError("dual did not converge within " +
                            std::to_string(options.max_iterations) +
                            " iterations (final gradient norm " +
                            std::to_string(sol.grad_norm) + ")",
                        sol.grad_norm);
}

}  // namespace fkflow
