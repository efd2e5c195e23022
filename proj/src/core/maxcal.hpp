#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fkflow {

// Single-time observable: J(state) evaluated at one time index in 1..horizon.
struct Observable {
  std::size_t time = 1;
  std::vector<double> values;  // indexed by state
};

// Discrete path-measure problem: paths are state sequences (s_0, ..., s_T)
// with T = horizon steps, a base Markov chain (initial distribution plus a
// row-stochastic kernel), and target expectations for the observables under
// the tilted path measure.
struct CaliberProblem {
  std::size_t n_states = 2;
  std::size_t horizon = 1;
  std::vector<Observable> observables;
  std::vector<double> targets;
  std::vector<double> base_kernel;   // n x n row-major; uniform when empty
  std::vector<double> base_initial;  // length n; uniform when empty

  static CaliberProblem uniform(std::size_t n_states, std::size_t horizon);
  // Fills defaults and checks the invariants; returns the completed problem.
  CaliberProblem completed() const;
};

inline constexpr std::size_t kMaxEnumerablePaths = 1000000;

// Explicit measure: one probability per path, indexed with s_0 as the most
// significant digit base n_states.
class ExplicitPathMeasure {
 public:
  ExplicitPathMeasure(std::size_t n_states, std::size_t horizon, std::vector<double> probs);

  std::size_t n_states() const { return n_states_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t n_paths() const { return probs_.size(); }
  const std::vector<double>& probabilities() const { return probs_; }

  std::size_t path_index(std::span<const std::size_t> path) const;
  void decode(std::size_t index, std::span<std::size_t> path) const;
  // Marginal distribution of the state at a time in 0..horizon.
  std::vector<double> marginal(std::size_t time) const;

 private:
  std::size_t n_states_;
  std::size_t horizon_;
  std::vector<double> probs_;
};

// Factored measure: initial distribution plus per-step tilted kernels (the
// Gibbs chain). Carries the base chain and the per-step tilt factors so the
// factorization itself can be audited.
struct FactoredPathMeasure {
  std::size_t n_states = 0;
  std::size_t horizon = 0;
  std::vector<double> initial;
  std::vector<std::vector<double>> step_kernels;  // horizon matrices, n x n
  std::vector<double> base_kernel;                // n x n
  std::vector<std::vector<double>> step_tilts;    // exp tilt per step, length n

  ExplicitPathMeasure expand() const;  // requires n^(horizon+1) <= limit
  std::vector<std::vector<double>> marginals() const;
};

struct MaxCalSolution {
  FactoredPathMeasure measure;
  std::vector<double> multipliers;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> dual_trace;
  double log_partition = 0.0;
};

// Maximum-caliber solve: finds multipliers so the tilted path measure
// base(path) * prod_i exp(-multiplier_i J_i(s at t_i)) matches the targets,
// using transfer-matrix contraction (O(horizon n^2) per evaluation, no
// enumeration) and the shared Newton dual solver. The returned measure is
// factored into the initial distribution and per-step tilted kernels.
MaxCalSolution maxcal_solve(const CaliberProblem& problem);

// Enumeration oracle: weighs every path explicitly and normalizes.
ExplicitPathMeasure brute_force_paths(const CaliberProblem& problem,
                                      std::span<const double> multipliers);

// Jaynes caliber of `measure` relative to `base`: -sum P log(P/Q), zero at
// P = Q and negative otherwise. Errors when P charges a path outside the
// support of Q.
double caliber(const ExplicitPathMeasure& measure, const ExplicitPathMeasure& base);

// Total variation distance between two explicit path measures.
double total_variation_paths(const ExplicitPathMeasure& a, const ExplicitPathMeasure& b);

// Consistency of the factored representation: rebuilds the explicit measure
// (a) as the direct product of the tilted kernels and (b) through the
// pairwise marginals obtained by Chapman-Kolmogorov composition, and returns
// the total-variation gap, maximized with a rank-one audit that each step
// kernel is a Gibbs reweighting of the base kernel.
double gluing_factorization_check(const FactoredPathMeasure& measure);

// Optimality probe: perturbs the solution measure multiplicatively with
// random path weights, projects each perturbation back onto the constraint
// set (an exponential-tilt projection solved with the same dual machinery),
// and counts how many projected measures have strictly lower caliber than
// the solution. A correct maximizer beats every perturbation.
std::size_t count_caliber_wins(const CaliberProblem& problem, const MaxCalSolution& solution,
                               std::size_t n_perturbations, std::uint64_t seed);

}  // namespace fkflow
