#include "core/maxcal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/dual_newton.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fkflow {

CaliberProblem CaliberProblem::uniform(std::size_t n_states, std::size_t horizon) {
  CaliberProblem p;
  p.n_states = n_states;
  p.horizon = horizon;
  return p.completed();
}

CaliberProblem CaliberProblem::completed() const {
  CaliberProblem p = *this;
  require(p.n_states >= 2, "caliber problem needs at least two states");
  require(p.horizon >= 1, "caliber problem needs at least one step");
  const std::size_t n = p.n_states;
  if (p.base_kernel.empty()) p.base_kernel.assign(n * n, 1.0 / static_cast<double>(n));
  if (p.base_initial.empty()) p.base_initial.assign(n, 1.0 / static_cast<double>(n));
  require(p.base_kernel.size() == n * n, "base kernel size does not match state count");
  require(p.base_initial.size() == n, "base initial size does not match state count");
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      require(p.base_kernel[i * n + j] >= 0.0, "base kernel entries must be nonnegative");
      sum += p.base_kernel[i * n + j];
    }
    require(std::abs(sum - 1.0) <= 1e-12,
            "base kernel row " + std::to_string(i) + " does not sum to 1");
  }
  {
    double sum = 0.0;
    for (double v : p.base_initial) {
      require(v >= 0.0, "base initial entries must be nonnegative");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-12, "base initial distribution does not sum to 1");
  }
  require(p.targets.size() == p.observables.size(),
          "target count does not match observable count");
  for (const Observable& o : p.observables) {
    require(o.time >= 1 && o.time <= p.horizon,
            "observable time must lie in 1..horizon");
    require(o.values.size() == n, "observable value table does not match state count");
    for (double v : o.values) require_finite(v, "observable value");
  }
  return p;
}

ExplicitPathMeasure::ExplicitPathMeasure(std::size_t n_states, std::size_t horizon,
                                         std::vector<double> probs)
    : n_states_(n_states), horizon_(horizon), probs_(std::move(probs)) {
  require(n_states_ >= 1, "path measure needs at least one state");
  std::size_t expected = 1;
  for (std::size_t t = 0; t <= horizon_; ++t) {
    expected *= n_states_;
    require(expected <= kMaxEnumerablePaths, "path space too large to enumerate");
  }
  require(probs_.size() == expected, "path probability count does not match path space");
  double total = 0.0;
  for (double v : probs_) {
    require(v >= 0.0, "path probabilities must be nonnegative");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-12,
          "path measure sums to " + std::to_string(total));
}

std::size_t ExplicitPathMeasure::path_index(std::span<const std::size_t> path) const {
  require(path.size() == horizon_ + 1, "path length does not match horizon");
  std::size_t idx = 0;
  for (std::size_t s : path) {
    require(s < n_states_, "state out of range");
    idx = idx * n_states_ + s;
  }
  return idx;
}

void ExplicitPathMeasure::decode(std::size_t index, std::span<std::size_t> path) const {
  require(path.size() == horizon_ + 1, "path length does not match horizon");
  for (std::size_t t = horizon_ + 1; t-- > 0;) {
    path[t] = index % n_states_;
    index /= n_states_;
  }
}

std::vector<double> ExplicitPathMeasure::marginal(std::size_t time) const {
  require(time <= horizon_, "marginal time out of range");
  std::vector<double> out(n_states_, 0.0);
  std::vector<std::size_t> path(horizon_ + 1);
  for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
    decode(idx, path);
    out[path[time]] += probs_[idx];
  }
  return out;
}

namespace {

// Transfer-matrix contraction state for a tilted chain. alphas[t] and
// betas[t] are scaled forward/backward vectors with log-scale accumulators;
// alphas[t] already includes the tilt applied at time t.
struct Transfer {
  std::size_t n = 0;
  std::size_t horizon = 0;
  const CaliberProblem* problem = nullptr;
  std::vector<std::vector<double>> tilt;    // per time 1..horizon, length n
  std::vector<std::vector<double>> alpha;   // index 0..horizon
  std::vector<double> alpha_log_scale;
  std::vector<std::vector<double>> beta;    // index 0..horizon
  std::vector<double> beta_log_scale;
  double log_partition = 0.0;

  Transfer(const CaliberProblem& p, std::span<const double> multipliers) {
    problem = &p;
    n = p.n_states;
    horizon = p.horizon;
    tilt.assign(horizon + 1, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < p.observables.size(); ++i) {
      const Observable& o = p.observables[i];
      for (std::size_t s = 0; s < n; ++s)
        tilt[o.time][s] *= std::exp(-multipliers[i] * o.values[s]);
    }
    forward();
    backward();
  }

  static double normalize(std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    require(sum > 0.0 && std::isfinite(sum), "transfer contraction degenerated");
    for (double& x : v) x /= sum;
    return std::log(sum);
  }

  void forward() {
    alpha.assign(horizon + 1, std::vector<double>(n, 0.0));
    alpha_log_scale.assign(horizon + 1, 0.0);
    alpha[0] = problem->base_initial;
    alpha_log_scale[0] = normalize(alpha[0]);
    const auto& q = problem->base_kernel;
    for (std::size_t t = 1; t <= horizon; ++t) {
      auto& next = alpha[t];
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += alpha[t - 1][i] * q[i * n + j];
        next[j] = acc * tilt[t][j];
      }
      alpha_log_scale[t] = alpha_log_scale[t - 1] + normalize(next);
    }
    double tail = 0.0;
    for (double x : alpha[horizon]) tail += x;  // 1 after normalize
    log_partition = alpha_log_scale[horizon] + std::log(tail);
  }

  void backward() {
    beta.assign(horizon + 1, std::vector<double>(n, 0.0));
    beta_log_scale.assign(horizon + 1, 0.0);
    beta[horizon].assign(n, 1.0);
    beta_log_scale[horizon] = normalize(beta[horizon]);
    const auto& q = problem->base_kernel;
    for (std::size_t t = horizon; t-- > 0;) {
      auto& prev = beta[t];
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += q[i * n + j] * tilt[t + 1][j] * beta[t + 1][j];
        prev[i] = acc;
      }
      beta_log_scale[t] = beta_log_scale[t + 1] + normalize(prev);
    }
  }

  // Marginal of the tilted measure at time t.
  std::vector<double> marginal(std::size_t t) const {
    std::vector<double> m(n);
    double sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      m[s] = alpha[t][s] * beta[t][s];
      sum += m[s];
    }
    require(sum > 0.0, "degenerate marginal");
    for (double& x : m) x /= sum;
    return m;
  }

  // E[f(s_t) g(s_u)] for t <= u under the tilted measure.
  double pair_expectation(std::size_t t, const std::vector<double>& f, std::size_t u,
                          const std::vector<double>& g) const {
    require(t <= u, "pair expectation needs t <= u");
    if (t == u) {
      const auto m = marginal(t);
      double acc = 0.0;
      for (std::size_t s = 0; s < n; ++s) acc += m[s] * f[s] * g[s];
      return acc;
    }
    const auto& q = problem->base_kernel;
    // v starts as the f-weighted forward vector at t and is propagated to u.
    std::vector<double> v(n), next(n);
    for (std::size_t s = 0; s < n; ++s) v[s] = alpha[t][s] * f[s];
    double log_scale = 0.0;
    for (std::size_t w = t + 1; w <= u; ++w) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += v[i] * q[i * n + j];
        next[j] = acc * tilt[w][j];
      }
      v = next;
      double mag = 0.0;
      for (double x : v) mag = std::max(mag, std::abs(x));
      if (mag > 0.0 && (mag > 1e100 || mag < 1e-100)) {
        for (double& x : v) x /= mag;
        log_scale += std::log(mag);
      }
    }
    double numer = 0.0;
    for (std::size_t s = 0; s < n; ++s) numer += v[s] * g[s] * beta[u][s];
    // Normalizer: same contraction with f = g = 1.
    std::vector<double> ones_v(alpha[t]);
    double ones_log = 0.0;
    for (std::size_t w = t + 1; w <= u; ++w) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += ones_v[i] * q[i * n + j];
        next[j] = acc * tilt[w][j];
      }
      ones_v = next;
      double mag = 0.0;
      for (double x : ones_v) mag = std::max(mag, std::abs(x));
      if (mag > 0.0 && (mag > 1e100 || mag < 1e-100)) {
        for (double& x : ones_v) x /= mag;
        ones_log += std::log(mag);
      }
    }
    double denom = 0.0;
    for (std::size_t s = 0; s < n; ++s) denom += ones_v[s] * beta[u][s];
    require(denom > 0.0, "degenerate pair normalizer");
    return numer / denom * std::exp(log_scale - ones_log);
  }

  FactoredPathMeasure factored() const {
    FactoredPathMeasure fm;
    fm.n_states = n;
    fm.horizon = horizon;
    fm.base_kernel = problem->base_kernel;
    fm.step_tilts.assign(horizon, std::vector<double>(n, 1.0));
    for (std::size_t t = 1; t <= horizon; ++t) fm.step_tilts[t - 1] = tilt[t];

    fm.initial.resize(n);
    double sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      fm.initial[s] = alpha[0][s] * beta[0][s];
      sum += fm.initial[s];
    }
    for (double& x : fm.initial) x /= sum;

    const auto& q = problem->base_kernel;
    fm.step_kernels.assign(horizon, std::vector<double>(n * n, 0.0));
    for (std::size_t t = 1; t <= horizon; ++t) {
      auto& kernel = fm.step_kernels[t - 1];
      for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          kernel[i * n + j] = q[i * n + j] * tilt[t][j] * beta[t][j];
          row_sum += kernel[i * n + j];
        }
        if (row_sum > 0.0) {
          for (std::size_t j = 0; j < n; ++j) kernel[i * n + j] /= row_sum;
        } else {
          // Unreachable start state: keep the base row, it carries no mass.
          for (std::size_t j = 0; j < n; ++j) kernel[i * n + j] = q[i * n + j];
        }
      }
    }
    return fm;
  }
};

}  // namespace

ExplicitPathMeasure FactoredPathMeasure::expand() const {
  std::size_t count = 1;
  for (std::size_t t = 0; t <= horizon; ++t) {
    count *= n_states;
    require(count <= kMaxEnumerablePaths,
            "path space too large to expand (limit 1e6 paths)");
  }
  std::vector<double> probs(count, 0.0);
  std::vector<std::size_t> path(horizon + 1);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rem = idx;
    for (std::size_t t = horizon + 1; t-- > 0;) {
      path[t] = rem % n_states;
      rem /= n_states;
    }
    double p = initial[path[0]];
    for (std::size_t t = 1; t <= horizon && p > 0.0; ++t)
      p *= step_kernels[t - 1][path[t - 1] * n_states + path[t]];
    probs[idx] = p;
  }
  double total = 0.0;
  for (double v : probs) total += v;
  for (double& v : probs) v /= total;
  return ExplicitPathMeasure(n_states, horizon, std::move(probs));
}

std::vector<std::vector<double>> FactoredPathMeasure::marginals() const {
  std::vector<std::vector<double>> out;
  out.push_back(initial);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto& prev = out.back();
    std::vector<double> next(n_states, 0.0);
    for (std::size_t i = 0; i < n_states; ++i)
      for (std::size_t j = 0; j < n_states; ++j)
        next[j] += prev[i] * step_kernels[t - 1][i * n_states + j];
    out.push_back(std::move(next));
  }
  return out;
}

MaxCalSolution maxcal_solve(const CaliberProblem& raw) {
  const CaliberProblem problem = raw.completed();
  const std::size_t k = problem.observables.size();

  DualModel model;
  model.log_partition = [&](std::span<const double> w) {
    return Transfer(problem, w).log_partition;
  };
  model.expectations = [&](std::span<const double> w) {
    Transfer tr(problem, w);
    std::vector<double> e(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const auto m = tr.marginal(problem.observables[i].time);
      for (std::size_t s = 0; s < problem.n_states; ++s)
        e[i] += m[s] * problem.observables[i].values[s];
    }
    return e;
  };
  model.covariance = [&](std::span<const double> w) {
    Transfer tr(problem, w);
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const auto m = tr.marginal(problem.observables[i].time);
      for (std::size_t s = 0; s < problem.n_states; ++s)
        mean[i] += m[s] * problem.observables[i].values[s];
    }
    std::vector<double> cov(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a; b < k; ++b) {
        const auto& oa = problem.observables[a];
        const auto& ob = problem.observables[b];
        const double joint = oa.time <= ob.time
                                 ? tr.pair_expectation(oa.time, oa.values, ob.time, ob.values)
                                 : tr.pair_expectation(ob.time, ob.values, oa.time, oa.values);
        cov[a * k + b] = joint - mean[a] * mean[b];
        cov[b * k + a] = cov[a * k + b];
      }
    return cov;
  };

  DualSolution dual = minimize_dual(model, problem.targets);
  Transfer tr(problem, dual.multipliers);
  MaxCalSolution sol;
  sol.measure = tr.factored();
  sol.multipliers = std::move(dual.multipliers);
  sol.iterations = dual.iterations;
  sol.grad_norm = dual.grad_norm;
  sol.dual_trace = std::move(dual.objective_trace);
  sol.log_partition = tr.log_partition;
  return sol;
}

ExplicitPathMeasure brute_force_paths(const CaliberProblem& raw,
                                      std::span<const double> multipliers) {
  const CaliberProblem problem = raw.completed();
  require(multipliers.size() == problem.observables.size(),
          "multiplier count does not match observable count");
  const std::size_t n = problem.n_states;
  std::size_t count = 1;
  for (std::size_t t = 0; t <= problem.horizon; ++t) {
    count *= n;
    require(count <= kMaxEnumerablePaths,
            "path space exceeds the enumeration limit of 1e6 paths");
  }
  std::vector<double> tilt((problem.horizon + 1) * n, 1.0);
  for (std::size_t i = 0; i < problem.observables.size(); ++i) {
    const Observable& o = problem.observables[i];
    for (std::size_t s = 0; s < n; ++s)
      tilt[o.time * n + s] *= std::exp(-multipliers[i] * o.values[s]);
  }

  std::vector<double> probs(count, 0.0);
  std::vector<std::size_t> path(problem.horizon + 1);
  double total = 0.0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rem = idx;
    for (std::size_t t = problem.horizon + 1; t-- > 0;) {
      path[t] = rem % n;
      rem /= n;
    }
    double w = problem.base_initial[path[0]];
    for (std::size_t t = 1; t <= problem.horizon && w > 0.0; ++t)
      w *= problem.base_kernel[path[t - 1] * n + path[t]] * tilt[t * n + path[t]];
    probs[idx] = w;
    total += w;
  }
  require(total > 0.0, "brute force: all path weights vanished");
  for (double& v : probs) v /= total;
  return ExplicitPathMeasure(n, problem.horizon, std::move(probs));
}

double caliber(const ExplicitPathMeasure& measure, const ExplicitPathMeasure& base) {
  require(measure.n_states() == base.n_states() && measure.horizon() == base.horizon(),
          "caliber: measures live on different path spaces");
  double value = 0.0;
  for (std::size_t idx = 0; idx < measure.n_paths(); ++idx) {
    const double p = measure.probabilities()[idx];
    if (p == 0.0) continue;
    const double q = base.probabilities()[idx];
    require(q > 0.0, "caliber: support mismatch (measure charges a path with zero "
                     "base probability)");
    value -= p * std::log(p / q);
  }
  return value;
}

double total_variation_paths(const ExplicitPathMeasure& a, const ExplicitPathMeasure& b) {
  require(a.n_states() == b.n_states() && a.horizon() == b.horizon(),
          "total variation: measures live on different path spaces");
  double sum = 0.0;
  for (std::size_t idx = 0; idx < a.n_paths(); ++idx)
    sum += std::abs(a.probabilities()[idx] - b.probabilities()[idx]);
  return 0.5 * sum;
}

double gluing_factorization_check(const FactoredPathMeasure& fm) {
  require(fm.horizon >= 1 && fm.n_states >= 1, "gluing check needs a factored measure");
  require(fm.step_kernels.size() == fm.horizon, "factored measure is missing step kernels");
  const std::size_t n = fm.n_states;

  // (a) Direct product of tilted per-step kernels.
  const ExplicitPathMeasure direct = fm.expand();

  // (b) Markov-chain reconstruction from the pairwise marginals produced by
  // Chapman-Kolmogorov composition of the same kernels.
  const auto marg = fm.marginals();
  std::vector<double> probs(direct.n_paths(), 0.0);
  std::vector<std::size_t> path(fm.horizon + 1);
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    direct.decode(idx, path);
    // pair_t(i,j) = marg[t-1][i] K_t(i,j); P = prod pair_t / prod interior marginals.
    double numer = 1.0;
    for (std::size_t t = 1; t <= fm.horizon; ++t)
      numer *= marg[t - 1][path[t - 1]] * fm.step_kernels[t - 1][path[t - 1] * n + path[t]];
    double denom = 1.0;
    for (std::size_t t = 1; t < fm.horizon; ++t) denom *= marg[t][path[t]];
    probs[idx] = denom > 0.0 ? numer / denom : 0.0;
  }
  double total = 0.0;
  for (double v : probs) total += v;
  require(total > 0.0, "gluing check: reconstruction degenerated");
  for (double& v : probs) v /= total;
  const ExplicitPathMeasure chained(n, fm.horizon, std::move(probs));

  double residual = total_variation_paths(direct, chained);

  // Gibbs audit: K_t / base must factor as row(s) x column(s'), i.e. the
  // ratio matrix has rank one on the support of the base kernel. Cross
  // ratios R(i,j) R(i',j') = R(i,j') R(i',j) detect any violation.
  if (!fm.base_kernel.empty()) {
    require(fm.base_kernel.size() == n * n, "base kernel size mismatch");
    for (std::size_t t = 0; t < fm.horizon; ++t) {
      const auto& kernel = fm.step_kernels[t];
      double max_ratio = 0.0;
      std::vector<double> ratio(n * n, 0.0);
      for (std::size_t e = 0; e < n * n; ++e) {
        if (fm.base_kernel[e] > 0.0) {
          ratio[e] = kernel[e] / fm.base_kernel[e];
          max_ratio = std::max(max_ratio, ratio[e]);
        } else {
          // Zero-support transitions must stay unused.
          residual = std::max(residual, std::abs(kernel[e]));
        }
      }
      if (max_ratio <= 0.0) continue;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t i2 = i + 1; i2 < n; ++i2)
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t j2 = j + 1; j2 < n; ++j2) {
              if (fm.base_kernel[i * n + j] == 0.0 || fm.base_kernel[i * n + j2] == 0.0 ||
                  fm.base_kernel[i2 * n + j] == 0.0 || fm.base_kernel[i2 * n + j2] == 0.0)
                continue;
              const double cross = ratio[i * n + j] * ratio[i2 * n + j2] -
                                   ratio[i * n + j2] * ratio[i2 * n + j];
              residual = std::max(residual, std::abs(cross) / (max_ratio * max_ratio));
            }
    }
  }
  return residual;
}

namespace {

// Exponential-tilt projection of an explicit measure onto the constraint set
// E[J_i(s at t_i)] = targets, reusing the Newton dual on path sums.
ExplicitPathMeasure project_onto_constraints(const ExplicitPathMeasure& base,
                                             const CaliberProblem& problem) {
  const std::size_t k = problem.observables.size();
  const std::size_t n_paths = base.n_paths();
  // Observable value per path.
  std::vector<std::vector<double>> path_obs(k, std::vector<double>(n_paths));
  std::vector<std::size_t> path(problem.horizon + 1);
  for (std::size_t idx = 0; idx < n_paths; ++idx) {
    base.decode(idx, path);
    for (std::size_t i = 0; i < k; ++i)
      path_obs[i][idx] = problem.observables[i].values[path[problem.observables[i].time]];
  }

  auto tilted = [&](std::span<const double> w, double* log_z) {
    std::vector<double> p(n_paths);
    double max_e = -1e300;
    for (std::size_t idx = 0; idx < n_paths; ++idx) {
      double e = 0.0;
      for (std::size_t i = 0; i < k; ++i) e -= w[i] * path_obs[i][idx];
      p[idx] = e;
      max_e = std::max(max_e, e);
    }
    double z = 0.0;
    for (std::size_t idx = 0; idx < n_paths; ++idx) {
      p[idx] = base.probabilities()[idx] * std::exp(p[idx] - max_e);
      z += p[idx];
    }
    require(z > 0.0, "projection degenerated");
    for (double& v : p) v /= z;
    if (log_z) *log_z = max_e + std::log(z);
    return p;
  };

  DualModel model;
  model.log_partition = [&](std::span<const double> w) {
    double log_z = 0.0;
    tilted(w, &log_z);
    return log_z;
  };
  model.expectations = [&](std::span<const double> w) {
    const auto p = tilted(w, nullptr);
    std::vector<double> e(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t idx = 0; idx < n_paths; ++idx) e[i] += p[idx] * path_obs[i][idx];
    return e;
  };
  model.covariance = [&](std::span<const double> w) {
    const auto p = tilted(w, nullptr);
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t idx = 0; idx < n_paths; ++idx) mean[i] += p[idx] * path_obs[i][idx];
    std::vector<double> cov(k * k, 0.0);
    for (std::size_t idx = 0; idx < n_paths; ++idx)
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b)
          cov[a * k + b] += p[idx] * (path_obs[a][idx] - mean[a]) * (path_obs[b][idx] - mean[b]);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < a; ++b) cov[a * k + b] = cov[b * k + a];
    return cov;
  };

  const DualSolution dual = minimize_dual(model, problem.targets);
  return ExplicitPathMeasure(base.n_states(), base.horizon(),
                             tilted(dual.multipliers, nullptr));
}

}  // namespace

std::size_t count_caliber_wins(const CaliberProblem& raw, const MaxCalSolution& solution,
                               std::size_t n_perturbations, std::uint64_t seed) {
  const CaliberProblem problem = raw.completed();
  const ExplicitPathMeasure solution_measure = solution.measure.expand();
  const ExplicitPathMeasure base_measure = brute_force_paths(
      problem, std::vector<double>(problem.observables.size(), 0.0));
  const double solution_caliber = caliber(solution_measure, base_measure);

  std::size_t wins = 0;
  for (std::size_t r = 0; r < n_perturbations; ++r) {
    CounterRng rng(seed, 0xCA11B3ULL + r);
    std::vector<double> probs = solution_measure.probabilities();
    double total = 0.0;
    for (double& p : probs) {
      p *= std::exp(rng.uniform01() - 0.5);
      total += p;
    }
    for (double& p : probs) p /= total;
    const ExplicitPathMeasure perturbed(problem.n_states, problem.horizon, std::move(probs));
    try {
      const ExplicitPathMeasure projected = project_onto_constraints(perturbed, problem);
      const double c = caliber(projected, base_measure);
      if (solution_caliber > c) ++wins;
    } catch (const Error&) {
      // A failed projection cannot beat the solution; it simply is not a win.
    }
  }
  return wins;
}

}  // namespace fkflow
