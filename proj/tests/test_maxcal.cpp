#include <doctest.h>

#include <cmath>

#include "core/dual_newton.hpp"
#include "core/errors.hpp"
#include "core/maxcal.hpp"

using namespace fkflow;

namespace {

CaliberProblem two_state_problem() {
  CaliberProblem p;
  p.n_states = 2;
  p.horizon = 2;
  Observable obs;
  obs.time = 2;
  obs.values = {0.0, 1.0};
  p.observables = {obs};
  p.targets = {0.7};
  return p.completed();
}

CaliberProblem three_state_problem() {
  CaliberProblem p;
  p.n_states = 3;
  p.horizon = 3;
  Observable j1;
  j1.time = 1;
  j1.values = {0.0, 1.0, 2.0};
  Observable j2;
  j2.time = 3;
  j2.values = {1.0, 0.0, 1.0};
  p.observables = {j1, j2};
  p.targets = {1.2, 0.4};
  return p.completed();
}

}  // namespace

TEST_CASE("zero observables leave the base path measure unchanged") {
  CaliberProblem p = CaliberProblem::uniform(2, 2);
  const MaxCalSolution sol = maxcal_solve(p);
  CHECK(sol.multipliers.empty());
  const ExplicitPathMeasure expanded = sol.measure.expand();
  for (double v : expanded.probabilities())
    CHECK(v == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("brute force with zero multipliers is the base measure") {
  CaliberProblem p = two_state_problem();
  const ExplicitPathMeasure base = brute_force_paths(p, std::vector<double>{0.0});
  for (double v : base.probabilities()) CHECK(v == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("a deterministic base kernel concentrates on a single path") {
  CaliberProblem p;
  p.n_states = 2;
  p.horizon = 2;
  p.base_initial = {1.0, 0.0};
  p.base_kernel = {0.0, 1.0, 1.0, 0.0};  // flip each step
  const ExplicitPathMeasure m = brute_force_paths(p.completed(), {});
  // Only 0 -> 1 -> 0 carries probability.
  std::vector<std::size_t> path = {0, 1, 0};
  CHECK(m.probabilities()[m.path_index(path)] == 1.0);
  double total = 0.0;
  for (double v : m.probabilities()) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("maxcal matches brute force on the 2-state, 2-step problem") {
  const CaliberProblem p = two_state_problem();
  const MaxCalSolution sol = maxcal_solve(p);
  CHECK(sol.grad_norm < 1e-10);
  const ExplicitPathMeasure oracle = brute_force_paths(p, sol.multipliers);
  CHECK(total_variation_paths(sol.measure.expand(), oracle) < 1e-8);
  // The target is met under the factored measure's own marginals.
  const auto marginals = sol.measure.marginals();
  CHECK(marginals[2][1] == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("maxcal matches brute force on the 3-state, 3-step problem") {
  const CaliberProblem p = three_state_problem();
  const MaxCalSolution sol = maxcal_solve(p);
  const ExplicitPathMeasure oracle = brute_force_paths(p, sol.multipliers);
  CHECK(total_variation_paths(sol.measure.expand(), oracle) < 1e-8);

  // Dual gradient identity: expectations match targets.
  const ExplicitPathMeasure expanded = sol.measure.expand();
  std::vector<double> expect(2, 0.0);
  std::vector<std::size_t> path(4);
  for (std::size_t idx = 0; idx < expanded.n_paths(); ++idx) {
    expanded.decode(idx, path);
    expect[0] += expanded.probabilities()[idx] * p.observables[0].values[path[1]];
    expect[1] += expanded.probabilities()[idx] * p.observables[1].values[path[3]];
  }
  CHECK(std::abs(expect[0] - 1.2) < 1e-8);
  CHECK(std::abs(expect[1] - 0.4) < 1e-8);
}

TEST_CASE("gluing factorization: base measure and solved problems") {
  CHECK(gluing_factorization_check(maxcal_solve(CaliberProblem::uniform(2, 3)).measure) <
        1e-15);
  CHECK(gluing_factorization_check(maxcal_solve(two_state_problem()).measure) < 1e-12);
  CHECK(gluing_factorization_check(maxcal_solve(three_state_problem()).measure) < 1e-12);
}

TEST_CASE("caliber: zero at the base, -log K for a point mass on K paths") {
  const CaliberProblem p = two_state_problem();
  const ExplicitPathMeasure base = brute_force_paths(p, std::vector<double>{0.0});
  CHECK(caliber(base, base) == 0.0);

  std::vector<double> point(base.n_paths(), 0.0);
  point[3] = 1.0;
  const ExplicitPathMeasure concentrated(2, 2, std::move(point));
  CHECK(caliber(concentrated, base) ==
        doctest::Approx(-std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("caliber flags support mismatches") {
  std::vector<double> q = {0.5, 0.5, 0.0, 0.0};
  std::vector<double> p = {0.25, 0.25, 0.25, 0.25};
  const ExplicitPathMeasure qm(2, 1, std::move(q));
  const ExplicitPathMeasure pm(2, 1, std::move(p));
  CHECK_THROWS_AS(caliber(pm, qm), InvalidArgument);
}

TEST_CASE("the solution dominates 100 constraint-respecting perturbations") {
  const CaliberProblem p = three_state_problem();
  const MaxCalSolution sol = maxcal_solve(p);
  CHECK(count_caliber_wins(p, sol, 100, 12345) == 100);
}

TEST_CASE("one-step caliber reduces to the discrete maximum-entropy problem") {
  // T = 1, uniform base: the t = 1 marginal must be the softmax
  // exp(-w J) / Z with the same multiplier as the static solve.
  CaliberProblem p;
  p.n_states = 4;
  p.horizon = 1;
  Observable obs;
  obs.time = 1;
  obs.values = {0.0, 1.0, 2.0, 3.0};
  p.observables = {obs};
  p.targets = {1.1};
  const MaxCalSolution sol = maxcal_solve(p.completed());

  // Static discrete maximum entropy via the same dual interface but with
  // plain softmax sums (an independent wiring of the same optimality
  // condition).
  DualModel model;
  const auto probs = [&](std::span<const double> w) {
    std::vector<double> out(4);
    double z = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      out[s] = std::exp(-w[0] * obs.values[s]);
      z += out[s];
    }
    for (double& v : out) v /= z;
    return out;
  };
  model.log_partition = [&](std::span<const double> w) {
    double z = 0.0;
    for (std::size_t s = 0; s < 4; ++s) z += std::exp(-w[0] * obs.values[s]);
    return std::log(z / 4.0);
  };
  model.expectations = [&](std::span<const double> w) {
    const auto pr = probs(w);
    double e = 0.0;
    for (std::size_t s = 0; s < 4; ++s) e += pr[s] * obs.values[s];
    return std::vector<double>{e};
  };
  model.covariance = [&](std::span<const double> w) {
    const auto pr = probs(w);
    double e = 0.0, e2 = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      e += pr[s] * obs.values[s];
      e2 += pr[s] * obs.values[s] * obs.values[s];
    }
    return std::vector<double>{e2 - e * e};
  };
  const DualSolution dual = minimize_dual(model, p.targets);

  CHECK(sol.multipliers[0] == doctest::Approx(dual.multipliers[0]).epsilon(1e-9));
  const auto static_probs = probs(dual.multipliers);
  const auto marginals = sol.measure.marginals();
  for (std::size_t s = 0; s < 4; ++s)
    CHECK(marginals[1][s] == doctest::Approx(static_probs[s]).epsilon(1e-9));
}

TEST_CASE("the dual objective is monotone along the maxcal solve") {
  const MaxCalSolution sol = maxcal_solve(three_state_problem());
  for (std::size_t i = 1; i < sol.dual_trace.size(); ++i)
    CHECK(sol.dual_trace[i] <= sol.dual_trace[i - 1] + 1e-12);
}

TEST_CASE("infeasible caliber targets raise an infeasibility report") {
  CaliberProblem p;
  p.n_states = 2;
  p.horizon = 2;
  Observable obs;
  obs.time = 2;
  obs.values = {0.0, 1.0};
  p.observables = {obs};
  p.targets = {1.5};  // outside [0, 1]
  CHECK_THROWS_AS(maxcal_solve(p.completed()), InfeasibleError);
}

TEST_CASE("enumeration limit is enforced") {
  CaliberProblem p;
  p.n_states = 10;
  p.horizon = 7;  // 10^8 paths
  CHECK_THROWS_AS(brute_force_paths(p.completed(), {}), InvalidArgument);
}

TEST_CASE("problem validation") {
  CaliberProblem p;
  p.n_states = 1;
  p.horizon = 1;
  CHECK_THROWS_AS(p.completed(), InvalidArgument);

  CaliberProblem bad_time;
  bad_time.n_states = 2;
  bad_time.horizon = 2;
  Observable obs;
  obs.time = 3;  // beyond the horizon
  obs.values = {0.0, 1.0};
  bad_time.observables = {obs};
  bad_time.targets = {0.5};
  CHECK_THROWS_AS(bad_time.completed(), InvalidArgument);

  CaliberProblem bad_kernel;
  bad_kernel.n_states = 2;
  bad_kernel.horizon = 1;
  bad_kernel.base_kernel = {0.5, 0.4, 0.5, 0.5};
  CHECK_THROWS_AS(bad_kernel.completed(), InvalidArgument);
}
