#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/manifold.hpp"
#include "core/maxent.hpp"

using namespace fkflow;

TEST_CASE("no constraints: the base measure is returned unchanged") {
  MaxEntProblem problem;
  problem.grid = Grid(0.0, 1.0, 101);
  const MaxEntSolution sol = maxent_density(problem);
  CHECK(sol.multipliers.empty());
  for (double v : sol.density.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mean and second-moment constraints (0, 1) recover the standard normal") {
  MaxEntProblem problem;
  problem.grid = Grid(-12.0, 12.0, 4001);
  problem.constraints = {[](double q) { return q; }, [](double q) { return q * q; }};
  problem.targets = {0.0, 1.0};
  const MaxEntSolution sol = maxent_density(problem);

  double linf = 0.0;
  for (std::size_t i = 0; i < problem.grid.n; ++i)
    linf = std::max(linf, std::abs(sol.density.values()[i] -
                                   gaussian_pdf(problem.grid.point(i), 0.0, 1.0)));
  CHECK(linf < 1e-6);
  CHECK(sol.grad_norm < 1e-10);
  // Constraint residuals straight from quadrature moments.
  CHECK(std::abs(sol.density.mean()) < 1e-8);
  const double second = sol.density.variance() + sol.density.mean() * sol.density.mean();
  CHECK(std::abs(second - 1.0) < 1e-8);
  // Multipliers: exp(-w1 q - w2 q^2) with w1 = 0, w2 = 1/2.
  CHECK(sol.multipliers[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sol.multipliers[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("quadratic-well constraint recovers the OU equilibrium") {
  const double b = 2.0, k = 0.5, lambda = 1.0;
  MaxEntProblem problem;
  problem.grid = Grid(k - 10.0, k + 10.0, 4001);
  problem.constraints = {[k](double q) { return (q - k) * (q - k); }};
  problem.targets = {lambda / b};
  const MaxEntSolution sol = maxent_density(problem);

  double linf = 0.0;
  for (std::size_t i = 0; i < problem.grid.n; ++i)
    linf = std::max(linf, std::abs(sol.density.values()[i] -
                                   gaussian_pdf(problem.grid.point(i), k, lambda / b)));
  CHECK(linf < 1e-6);
  CHECK(sol.multipliers[0] == doctest::Approx(b / (2.0 * lambda)).epsilon(1e-9));
}

TEST_CASE("the dual objective decreases at every accepted step") {
  MaxEntProblem problem;
  problem.grid = Grid(-10.0, 10.0, 2001);
  problem.constraints = {[](double q) { return q; }, [](double q) { return q * q; }};
  problem.targets = {0.7, 1.5};
  const MaxEntSolution sol = maxent_density(problem);
  for (std::size_t i = 1; i < sol.dual_trace.size(); ++i)
    CHECK(sol.dual_trace[i] <= sol.dual_trace[i - 1] + 1e-12);
}

TEST_CASE("infeasible targets raise an infeasibility report") {
  MaxEntProblem problem;
  problem.grid = Grid(0.0, 1.0, 201);
  problem.constraints = {[](double q) { return q; }};
  problem.targets = {2.0};  // outside [0, 1]
  try {
    maxent_density(problem);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.gradient_norm > 0.0);
  }
}

TEST_CASE("custom base measure tilts the solution") {
  // Base exp(-q) on [0, 6], constrain the mean to 2: solution is the tilted
  // exponential exp(-(1 + w) q) with mean 2 on the truncated domain.
  MaxEntProblem problem;
  problem.grid = Grid(0.0, 20.0, 4001);
  std::vector<double> base(problem.grid.n);
  for (std::size_t i = 0; i < problem.grid.n; ++i)
    base[i] = std::exp(-problem.grid.point(i));
  problem.base = GridDensity::normalized(problem.grid, std::move(base));
  problem.constraints = {[](double q) { return q; }};
  problem.targets = {2.0};
  const MaxEntSolution sol = maxent_density(problem);
  CHECK(sol.density.mean() == doctest::Approx(2.0).epsilon(1e-8));
  // Effective rate r = 1 + w solves 1/r - 20 e^{-20r}/(1 - e^{-20r}) = 2
  // (truncated-exponential mean); r = 0.4997720... on this domain.
  CHECK(sol.multipliers[0] == doctest::Approx(-0.5002280).epsilon(1e-5));
}
