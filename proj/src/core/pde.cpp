#include "core/pde.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace fkflow {

GeneratorSpec ou_generator(const OuParams& params) {
  GeneratorSpec gen;
  gen.drift = [params](double q, double) {
    return -params.mean_reversion * (q - params.stationary_mean);
  };
  gen.diffusion = [lambda = params.noise_intensity](double, double) { return lambda; };
  gen.time_dependent = false;
  return gen;
}

GeneratorSpec wiener_generator(double drift_rate, double noise_intensity) {
  require(noise_intensity >= 0.0, "noise intensity must be nonnegative");
  GeneratorSpec gen;
  gen.drift = [drift_rate](double, double) { return -drift_rate; };
  gen.diffusion = [noise_intensity](double, double) { return noise_intensity; };
  gen.time_dependent = false;
  return gen;
}

std::vector<double> apply_generator(const GeneratorSpec& gen, const GridFunction& f, double t) {
  const std::size_t n = f.grid.n;
  require(n >= 5, "apply_generator needs at least 5 grid points");
  const double dx = f.grid.dx();
  const auto& v = f.values;
  std::vector<double> out(n);

  auto at = [&](std::size_t i, double d1, double d2) {
    const double q = f.grid.point(i);
    const double s = gen.diffusion(q, t);
    require(s >= 0.0, "diffusion coefficient must be nonnegative");
    out[i] = gen.drift(q, t) * d1 + s * d2;
  };

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d1 = (v[i + 1] - v[i - 1]) / (2.0 * dx);
    const double d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dx * dx);
    at(i, d1, d2);
  }
  // Second-order one-sided stencils at the edges.
  at(0, (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx),
     (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (dx * dx));
  at(n - 1, (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dx),
     (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / (dx * dx));
  return out;
}

namespace {

struct Coefficients {
  std::vector<double> drift;
  std::vector<double> diffusion;
};

Coefficients sample_coefficients(const GeneratorSpec& gen, const Grid& grid, double t) {
  Coefficients c;
  c.drift.resize(grid.n);
  c.diffusion.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double q = grid.point(i);
    c.drift[i] = gen.drift(q, t);
    c.diffusion[i] = gen.diffusion(q, t);
    require(c.diffusion[i] >= 0.0, "diffusion coefficient must be nonnegative");
    require_finite(c.drift[i], "drift coefficient");
  }
  return c;
}

struct RecordPlan {
  std::vector<std::size_t> steps;   // ascending step indices to record
  std::vector<double> times;
};

RecordPlan plan_records(const PdeProblem& p, std::size_t n_steps, double h) {
  std::vector<std::size_t> marks = {0, n_steps};
  for (double t : p.record_times) {
    require(t >= std::min(p.t_start, p.t_end) - 1e-12 &&
                t <= std::max(p.t_start, p.t_end) + 1e-12,
            "record time outside the integration span");
    const double offset = std::abs(t - p.t_start);
    marks.push_back(static_cast<std::size_t>(std::llround(offset / h)));
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  RecordPlan plan;
  plan.steps = std::move(marks);
  return plan;
}

}  // namespace

double cfl_limit(const GeneratorSpec& gen, const Grid& grid, double t_start, double t_end) {
  double max_s = 0.0;
  double max_m = 0.0;
  const int time_samples = gen.time_dependent ? 5 : 1;
  for (int k = 0; k < time_samples; ++k) {
    const double t = time_samples == 1
                         ? t_start
                         : t_start + (t_end - t_start) * k / (time_samples - 1);
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double q = grid.point(i);
      max_s = std::max(max_s, gen.diffusion(q, t));
      max_m = std::max(max_m, std::abs(gen.drift(q, t)));
    }
  }
  const double dx = grid.dx();
  const double denom = 2.0 * max_s + max_m * dx;
  require(denom > 0.0, "degenerate generator: no diffusion and no drift");
  return dx * dx / denom;
}

const std::vector<double>& PdeSolution::at(double t) const {
  require(!times.empty(), "empty solution");
  std::size_t best = 0;
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - t) < std::abs(times[best] - t)) best = k;
  return frames[best];
}

PdeSolution solve_forward(const PdeProblem& problem) {
  require(problem.direction == PdeDirection::forward, "problem direction is not forward");
  require(problem.t_end >= problem.t_start, "forward solve needs t_end >= t_start");
  require(problem.dt > 0.0, "time step must be positive");
  const Grid& grid = problem.grid;
  require(problem.boundary_data.size() == grid.n, "initial data does not match grid");
  {
    const double mass = trapezoid(grid, problem.boundary_data);
    require(std::abs(mass - 1.0) <= GridDensity::kNormTolerance,
            "initial density is not normalized: integral = " + std::to_string(mass));
  }
  const double span = problem.t_end - problem.t_start;
  const double limit = cfl_limit(problem.generator, grid, problem.t_start, problem.t_end);
  if (problem.dt > limit)
    throw NumericError("CFL violation: dt = " + std::to_string(problem.dt) +
                       " exceeds the stability limit " + std::to_string(limit));

  const auto n_steps =
      span == 0.0 ? std::size_t{0}
                  : static_cast<std::size_t>(std::ceil(span / problem.dt - 1e-9));
  const double h = n_steps == 0 ? 0.0 : span / static_cast<double>(n_steps);
  RecordPlan plan = plan_records(problem, n_steps, h == 0.0 ? 1.0 : h);

  const std::size_t n = grid.n;
  const double dx = grid.dx();
  std::vector<double> p = problem.boundary_data;
  std::vector<double> next(n);
  // Flux form: d/dt p = -D_c(drift p) + D2(diffusion p). Products are formed
  // pointwise, then differenced, which keeps the discrete operator the exact
  // adjoint of the backward stencil.
  std::vector<double> drift_p(n), diff_p(n);
  Coefficients coeff = sample_coefficients(problem.generator, grid, problem.t_start);

  PdeSolution solution;
  solution.grid = grid;
  std::size_t mark_pos = 0;
  auto maybe_record = [&](std::size_t step) {
    if (mark_pos < plan.steps.size() && plan.steps[mark_pos] == step) {
      solution.times.push_back(problem.t_start + h * static_cast<double>(step));
      solution.frames.push_back(p);
      ++mark_pos;
    }
  };
  auto check_mass = [&](std::size_t step) {
    const double mass = trapezoid(grid, p);
    if (std::abs(mass - 1.0) > 1e-4)
      throw NumericError("mass leakage at t = " +
                         std::to_string(problem.t_start + h * static_cast<double>(step)) +
                         " (integral = " + std::to_string(mass) +
                         "); domain too small");
  };

  maybe_record(0);
  const double left = p.front();
  const double right = p.back();
  for (std::size_t step = 0; step < n_steps; ++step) {
    if (problem.generator.time_dependent)
      coeff = sample_coefficients(problem.generator, grid,
                                  problem.t_start + h * static_cast<double>(step));
    for (std::size_t i = 0; i < n; ++i) {
      drift_p[i] = coeff.drift[i] * p[i];
      diff_p[i] = coeff.diffusion[i] * p[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double advect = (drift_p[i + 1] - drift_p[i - 1]) / (2.0 * dx);
      const double diffuse = (diff_p[i + 1] - 2.0 * diff_p[i] + diff_p[i - 1]) / (dx * dx);
      next[i] = p[i] + h * (-advect + diffuse);
    }
    next.front() = left;
    next.back() = right;
    p.swap(next);
    for (double v : p)
      if (!std::isfinite(v))
        throw NumericError("forward solve produced a non-finite value at step " +
                           std::to_string(step + 1));
    if ((step + 1) % 500 == 0) check_mass(step + 1);
    maybe_record(step + 1);
  }
  check_mass(n_steps);
  return solution;
}

PdeSolution solve_backward(const PdeProblem& problem) {
  require(problem.direction == PdeDirection::backward, "problem direction is not backward");
  require(problem.t_end >= problem.t_start, "backward solve needs t_end >= t_start");
  require(problem.dt > 0.0, "time step must be positive");
  const Grid& grid = problem.grid;
  require(problem.boundary_data.size() == grid.n, "terminal data does not match grid");

  const double span = problem.t_end - problem.t_start;
  const double limit = cfl_limit(problem.generator, grid, problem.t_start, problem.t_end);
  if (problem.dt > limit)
    throw NumericError("CFL violation: dt = " + std::to_string(problem.dt) +
                       " exceeds the stability limit " + std::to_string(limit));

  const auto n_steps =
      span == 0.0 ? std::size_t{0}
                  : static_cast<std::size_t>(std::ceil(span / problem.dt - 1e-9));
  const double h = n_steps == 0 ? 0.0 : span / static_cast<double>(n_steps);

  // March in reversed time tau = t_end - t, where d/dtau u = A u.
  PdeProblem reversed = problem;
  reversed.t_start = 0.0;
  reversed.t_end = span;
  reversed.record_times.clear();
  for (double t : problem.record_times) reversed.record_times.push_back(problem.t_end - t);
  RecordPlan plan = plan_records(reversed, n_steps, h == 0.0 ? 1.0 : h);

  const std::size_t n = grid.n;
  const double dx = grid.dx();
  std::vector<double> u = problem.boundary_data;
  std::vector<double> next(n);
  Coefficients coeff = sample_coefficients(problem.generator, grid, problem.t_end);

  std::vector<double> rev_times;
  std::vector<std::vector<double>> rev_frames;
  std::size_t mark_pos = 0;
  auto maybe_record = [&](std::size_t step) {
    if (mark_pos < plan.steps.size() && plan.steps[mark_pos] == step) {
      rev_times.push_back(problem.t_end - h * static_cast<double>(step));
      rev_frames.push_back(u);
      ++mark_pos;
    }
  };

  maybe_record(0);
  const double left = u.front();
  const double right = u.back();
  for (std::size_t step = 0; step < n_steps; ++step) {
    if (problem.generator.time_dependent)
      coeff = sample_coefficients(problem.generator, grid,
                                  problem.t_end - h * static_cast<double>(step));
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double d1 = (u[i + 1] - u[i - 1]) / (2.0 * dx);
      const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dx * dx);
      next[i] = u[i] + h * (coeff.drift[i] * d1 + coeff.diffusion[i] * d2);
    }
    next.front() = left;
    next.back() = right;
    u.swap(next);
    for (double v : u)
      if (!std::isfinite(v))
        throw NumericError("backward solve produced a non-finite value at step " +
                           std::to_string(step + 1));
    maybe_record(step + 1);
  }

  PdeSolution solution;
  solution.grid = grid;
  for (std::size_t k = rev_times.size(); k-- > 0;) {
    solution.times.push_back(rev_times[k]);
    solution.frames.push_back(std::move(rev_frames[k]));
  }
  return solution;
}

double dynkin_residual(const TransitionKernel& kernel, const GeneratorSpec& gen,
                       const GridFunction& f, double h) {
  require(h > 0.0, "dynkin residual requires h > 0");
  require(kernel.size() == f.grid.n, "kernel cells do not match the function grid");
  const std::vector<double> propagated = kernel.apply_to_function(f.values);
  const std::vector<double> generated = apply_generator(gen, f, 0.0);
  double residual = 0.0;
  // Interior points only: the one-sided boundary stencils and the kernel's
  // clamped edge rows are excluded.
  for (std::size_t i = 2; i + 2 < f.grid.n; ++i) {
    const double rate = (propagated[i] - f.values[i]) / h;
    residual = std::max(residual, std::abs(rate - generated[i]));
  }
  return residual;
}

}  // namespace fkflow
