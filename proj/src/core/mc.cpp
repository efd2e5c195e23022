#include "core/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fkflow {

SdeSpec ou_sde(const OuParams& params) {
  SdeSpec sde;
  sde.drift = [params](double q, double) {
    return -params.mean_reversion * (q - params.stationary_mean);
  };
  sde.vol = [sigma = std::sqrt(2.0 * params.noise_intensity)](double, double) { return sigma; };
  sde.affine = SdeSpec::Affine{params.mean_reversion * params.stationary_mean,
                               -params.mean_reversion,
                               std::sqrt(2.0 * params.noise_intensity)};
  return sde;
}

SdeSpec wiener_sde(double drift_rate, double noise_intensity) {
  require(noise_intensity >= 0.0, "noise intensity must be nonnegative");
  SdeSpec sde;
  sde.drift = [drift_rate](double, double) { return -drift_rate; };
  sde.vol = [sigma = std::sqrt(2.0 * noise_intensity)](double, double) { return sigma; };
  sde.affine = SdeSpec::Affine{-drift_rate, 0.0, std::sqrt(2.0 * noise_intensity)};
  return sde;
}

std::vector<double> PathEnsemble::column(std::size_t time_index) const {
  require(time_index < times.size(), "recorded time index out of range");
  std::vector<double> out(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) out[p] = state(p, time_index);
  return out;
}

namespace {

struct StepPlan {
  std::size_t n_steps = 0;
  double h = 0.0;
  std::vector<std::size_t> record_steps;  // ascending, includes 0 and n_steps
  std::vector<double> record_times;
};

StepPlan plan_steps(double t_start, double t_end, double dt,
                    const std::vector<double>& record_times) {
  require(dt > 0.0, "time step must be positive");
  require(t_end >= t_start, "sampling span must have t_end >= t_start");
  StepPlan plan;
  const double span = t_end - t_start;
  if (span > 0.0) {
    const double raw = span / dt;
    require(raw <= 5e8, "step count overflow (span/dt too large)");
    plan.n_steps = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    plan.h = span / static_cast<double>(plan.n_steps);
  }
  std::vector<std::size_t> marks;
  if (record_times.empty()) {
    // Keep every step.
    marks.resize(plan.n_steps + 1);
    for (std::size_t k = 0; k <= plan.n_steps; ++k) marks[k] = k;
  } else {
    marks = {0, plan.n_steps};
    for (double t : record_times) {
      require(t >= t_start - 1e-12 && t <= t_end + 1e-12, "record time outside the span");
      marks.push_back(plan.n_steps == 0
                          ? 0
                          : static_cast<std::size_t>(std::llround((t - t_start) / plan.h)));
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  }
  plan.record_steps = std::move(marks);
  for (std::size_t s : plan.record_steps)
    plan.record_times.push_back(t_start + plan.h * static_cast<double>(s));
  if (plan.n_steps == 0) plan.record_times.assign(plan.record_steps.size(), t_start);
  return plan;
}

PathEnsemble sample_paths(const SdeSpec& sde, std::optional<std::pair<double, double>> gauss_start,
                          double q0, double t_start, double t_end, double dt,
                          std::size_t n_paths, std::uint64_t seed,
                          const std::vector<double>& record_times) {
  require(n_paths >= 1, "need at least one path");
  require(static_cast<bool>(sde.drift) && static_cast<bool>(sde.vol),
          "SDE spec is missing drift or volatility");
  const StepPlan plan = plan_steps(t_start, t_end, dt, record_times);

  PathEnsemble ensemble;
  ensemble.times = plan.record_times;
  ensemble.n_paths = n_paths;
  ensemble.seed = seed;
  ensemble.dt = dt;
  ensemble.states.resize(n_paths * plan.record_steps.size());

  const double sqrt_h = std::sqrt(plan.h);
  const bool affine = sde.affine.has_value();
  const double a0 = affine ? sde.affine->a0 : 0.0;
  const double a1 = affine ? sde.affine->a1 : 0.0;
  const double c0 = affine ? sde.affine->c0 : 0.0;

  for (std::size_t p = 0; p < n_paths; ++p) {
    CounterRng rng(seed, p);
    double y = q0;
    if (gauss_start)
      y = gauss_start->first + std::sqrt(gauss_start->second) * rng.normal();
    double* out = ensemble.states.data() + p * plan.record_steps.size();
    std::size_t mark = 0;
    if (plan.record_steps[mark] == 0) out[mark++] = y;
    if (affine) {
      const double drift_mul = 1.0 + a1 * plan.h;
      const double drift_add = a0 * plan.h;
      const double noise_mul = c0 * sqrt_h;
      for (std::size_t k = 0; k < plan.n_steps; ++k) {
        y = y * drift_mul + drift_add + noise_mul * rng.normal();
        if (mark < plan.record_steps.size() && plan.record_steps[mark] == k + 1)
          out[mark++] = y;
      }
    } else {
      for (std::size_t k = 0; k < plan.n_steps; ++k) {
        const double t = t_start + plan.h * static_cast<double>(k);
        y += sde.drift(y, t) * plan.h + sde.vol(y, t) * sqrt_h * rng.normal();
        if (!std::isfinite(y))
          throw NumericError("path " + std::to_string(p) +
                             " became non-finite at step " + std::to_string(k + 1) +
                             " (t = " + std::to_string(t + plan.h) + ")");
        if (mark < plan.record_steps.size() && plan.record_steps[mark] == k + 1)
          out[mark++] = y;
      }
    }
    if (!std::isfinite(y))
      throw NumericError("path " + std::to_string(p) + " became non-finite");
  }
  return ensemble;
}

}  // namespace

PathEnsemble euler_maruyama(const SdeSpec& sde, double q0, double t_start, double t_end,
                            double dt, std::size_t n_paths, std::uint64_t seed,
                            const std::vector<double>& record_times) {
  require_finite(q0, "initial state");
  return sample_paths(sde, std::nullopt, q0, t_start, t_end, dt, n_paths, seed, record_times);
}

PathEnsemble euler_maruyama_gaussian_start(const SdeSpec& sde, double mean0, double var0,
                                           double t_start, double t_end, double dt,
                                           std::size_t n_paths, std::uint64_t seed,
                                           const std::vector<double>& record_times) {
  require_finite(mean0, "initial mean");
  require(var0 >= 0.0, "initial variance must be nonnegative");
  return sample_paths(sde, std::make_pair(mean0, var0), mean0, t_start, t_end, dt, n_paths,
                      seed, record_times);
}

FkEstimate fk_estimate(const SdeSpec& sde, const std::function<double(double)>& terminal,
                       double q, double t, double t_end, double dt, std::size_t n_paths,
                       std::uint64_t seed) {
  require(static_cast<bool>(terminal), "terminal function is empty");
  require(t <= t_end, "query time must not exceed the terminal time");
  const PathEnsemble ensemble =
      euler_maruyama(sde, q, t, t_end, dt, n_paths, seed, {t_end});
  const std::size_t last = ensemble.times.size() - 1;

  std::vector<double> values(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) values[p] = terminal(ensemble.state(p, last));

  // A constant integrand has exactly zero spread; skip the subtraction noise.
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return FkEstimate{*lo, 0.0, n_paths};

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n_paths);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double variance = n_paths > 1 ? ss / static_cast<double>(n_paths - 1) : 0.0;
  return FkEstimate{mean, std::sqrt(variance / static_cast<double>(n_paths)), n_paths};
}

TransitionKernel estimate_kernel(const SdeSpec& sde, const CellGrid& cells, double t0,
                                 double t1, double dt, std::size_t n_per_cell,
                                 std::uint64_t seed) {
  require(t1 >= t0, "kernel estimation needs t1 >= t0");
  require(n_per_cell >= 1, "need at least one sample per cell");
  const std::size_t n = cells.n_cells;
  std::vector<double> data(n * n, 0.0);
  std::size_t leaked = 0;

  for (std::size_t i = 0; i < n; ++i) {
    // Distinct seed block per start cell keeps rows independent and the
    // whole kernel reproducible for fixed (seed, n_per_cell).
    const PathEnsemble ensemble = sample_paths(
        sde, std::nullopt, cells.midpoint(i), t0, t1, dt, n_per_cell,
        seed + 0x51ED5EEDULL * (i + 1), {t1});
    const std::size_t last = ensemble.times.size() - 1;
    double* row = data.data() + i * n;
    for (std::size_t p = 0; p < n_per_cell; ++p) {
      const double y = ensemble.state(p, last);
      auto j = cells.cell_index(y);
      if (j < 0) {
        ++leaked;
        j = y < cells.lo ? 0 : static_cast<std::ptrdiff_t>(n) - 1;
      }
      row[j] += 1.0;
    }
    for (std::size_t j = 0; j < n; ++j) row[j] /= static_cast<double>(n_per_cell);
  }

  const double leak_fraction =
      static_cast<double>(leaked) / static_cast<double>(n * n_per_cell);
  if (leak_fraction > 1e-3)
    throw NumericError("estimate_kernel: " + std::to_string(100.0 * leak_fraction) +
                       "% of the sampled mass left the cell range; grid too small");
  return TransitionKernel(n, std::move(data), t1 - t0);
}

double silverman_bandwidth(std::span<const double> samples) {
  require(samples.size() >= 2, "bandwidth needs at least two samples");
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  std::vector<double> sorted(samples.begin(), samples.end());
  const auto q1_pos = sorted.size() / 4;
  const auto q3_pos = (3 * sorted.size()) / 4;
  std::nth_element(sorted.begin(), sorted.begin() + q1_pos, sorted.end());
  const double q1 = sorted[q1_pos];
  std::nth_element(sorted.begin(), sorted.begin() + q3_pos, sorted.end());
  const double q3 = sorted[q3_pos];
  const double iqr_scale = (q3 - q1) / 1.349;

  double spread = sd;
  if (iqr_scale > 0.0) spread = std::min(spread, iqr_scale);
  require(spread > 0.0, "degenerate sample spread; cannot choose a bandwidth");
  return 0.9 * spread * std::pow(n, -0.2);
}

GridDensity kde_density(std::span<const double> samples, const Grid& grid, double bandwidth) {
  require(!samples.empty(), "kde needs samples");
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(samples);
  const double dx = grid.dx();

  // Bin at the grid spacing (cells centered on grid points), then convolve
  // with a discrete normal kernel. Out-of-range samples clamp to the edges.
  const CellGrid cells = CellGrid::centered_on(grid);
  std::vector<double> hist(grid.n, 0.0);
  for (double y : samples) {
    auto j = cells.cell_index(y);
    if (j < 0) j = y < cells.lo ? 0 : static_cast<std::ptrdiff_t>(grid.n) - 1;
    hist[j] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(samples.size()) * dx);
  for (double& v : hist) v *= norm;

  const auto radius = static_cast<std::size_t>(std::ceil(6.0 * h / dx));
  std::vector<double> kernel(radius + 1);
  double ksum = 0.0;
  for (std::size_t m = 0; m <= radius; ++m) {
    const double z = static_cast<double>(m) * dx / h;
    kernel[m] = std::exp(-0.5 * z * z);
    ksum += m == 0 ? kernel[m] : 2.0 * kernel[m];
  }
  for (double& w : kernel) w /= ksum;

  std::vector<double> smooth(grid.n, 0.0);
  for (std::size_t i = 0; i < grid.n; ++i) {
    double acc = kernel[0] * hist[i];
    for (std::size_t m = 1; m <= radius; ++m) {
      const double left = i >= m ? hist[i - m] : 0.0;
      const double right = i + m < grid.n ? hist[i + m] : 0.0;
      acc += kernel[m] * (left + right);
    }
    smooth[i] = acc;
  }
  return GridDensity::normalized(grid, std::move(smooth));
}

ParamPoint process_moments(const ProcessSpec& process, const ParamPoint& x0, double t) {
  return std::visit(
      [&](const auto& p) -> ParamPoint {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OuParams>) return ou_moment_flow(p, x0, t);
        else return wiener_moment_flow(p.drift_rate, p.noise_intensity, x0, t);
      },
      process);
}

GeneratorSpec process_generator(const ProcessSpec& process) {
  return std::visit(
      [](const auto& p) -> GeneratorSpec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OuParams>) return ou_generator(p);
        else return wiener_generator(p.drift_rate, p.noise_intensity);
      },
      process);
}

SdeSpec process_sde(const ProcessSpec& process) {
  return std::visit(
      [](const auto& p) -> SdeSpec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OuParams>) return ou_sde(p);
        else return wiener_sde(p.drift_rate, p.noise_intensity);
      },
      process);
}

FunctorReport verify_functor(const ProcessSpec& process, const ParamPoint& x0, double t,
                             const FunctorOptions& options) {
  require(t >= 0.0, "time must be nonnegative");
  x0.check_finite();
  require(x0.dim() == 2 && x0.variance() >= kVarianceFloor,
          "functor check needs a (mean, variance) start with variance >= 1e-12");

  const ParamPoint xt = process_moments(process, x0, t);

  // Common grid covering ten standard deviations of both endpoints.
  const double lo = std::min(x0.mean() - 10.0 * std::sqrt(x0.variance()),
                             xt.mean() - 10.0 * std::sqrt(xt.variance()));
  const double hi = std::max(x0.mean() + 10.0 * std::sqrt(x0.variance()),
                             xt.mean() + 10.0 * std::sqrt(xt.variance()));
  const Grid grid = Grid::with_spacing(lo, hi, options.dx);

  // Parameter route: closed-form moment flow mapped through F.
  std::vector<double> param_values(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i)
    param_values[i] = gaussian_pdf(grid.point(i), xt.mean(), xt.variance());
  const GridDensity param_density = GridDensity::normalized(grid, std::move(param_values));

  // PDE route: Fokker-Planck evolution of the initial density.
  std::vector<double> initial(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i)
    initial[i] = gaussian_pdf(grid.point(i), x0.mean(), x0.variance());
  const GridDensity initial_density = GridDensity::normalized(grid, std::move(initial));
  PdeProblem problem;
  problem.generator = process_generator(process);
  problem.grid = grid;
  problem.t_start = 0.0;
  problem.t_end = t;
  problem.direction = PdeDirection::forward;
  problem.boundary_data = initial_density.values();
  problem.dt = 0.4 * cfl_limit(problem.generator, grid, 0.0, t);
  const PdeSolution forward = solve_forward(problem);
  const GridDensity pde_density = GridDensity::normalized(grid, forward.frames.back());

  // Monte Carlo route: sample the initial law, evolve paths, estimate the
  // terminal density with a Gaussian KDE on the same grid.
  const PathEnsemble ensemble =
      euler_maruyama_gaussian_start(process_sde(process), x0.mean(), x0.variance(), 0.0, t,
                                    options.dt, options.n_paths, options.seed, {t});
  const std::vector<double> terminal = ensemble.column(ensemble.times.size() - 1);
  const double bandwidth = silverman_bandwidth(terminal);
  const GridDensity mc_density = kde_density(terminal, grid, bandwidth);

  FunctorReport report;
  report.time = t;
  report.grid = grid;
  report.kde_bandwidth = bandwidth;
  report.l1_param_pde = l1_distance(param_density.as_function(), pde_density.as_function());
  report.l1_param_mc = l1_distance(param_density.as_function(), mc_density.as_function());
  report.l1_pde_mc = l1_distance(pde_density.as_function(), mc_density.as_function());

  // Expected KDE L1 error: sqrt(2/pi) sqrt(R(K)/(N h)) int sqrt(p)
  // + (h^2/2) int |p''|, evaluated on the parameter-route density.
  {
    const double n = static_cast<double>(options.n_paths);
    const double rk = 1.0 / (2.0 * std::sqrt(std::numbers::pi));
    std::vector<double> sqrtp(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) sqrtp[i] = std::sqrt(param_density.values()[i]);
    const double int_sqrtp = trapezoid(grid, sqrtp);
    std::vector<double> curvature(grid.n, 0.0);
    const double dx = grid.dx();
    for (std::size_t i = 1; i + 1 < grid.n; ++i)
      curvature[i] = std::abs(param_density.values()[i + 1] - 2.0 * param_density.values()[i] +
                              param_density.values()[i - 1]) /
                     (dx * dx);
    const double int_curv = trapezoid(grid, curvature);
    report.mc_l1_bound = std::sqrt(2.0 / std::numbers::pi) * std::sqrt(rk / (n * bandwidth)) *
                             int_sqrtp +
                         0.5 * bandwidth * bandwidth * int_curv;
  }

  report.pass_param_pde = report.l1_param_pde < options.tol_param_pde;
  report.pass_param_mc = report.l1_param_mc < options.tol_param_mc;
  report.pass_pde_mc = report.l1_pde_mc < options.tol_pde_mc;
  report.passed = report.pass_param_pde && report.pass_param_mc && report.pass_pde_mc;
  report.density_param = param_density.values();
  report.density_pde = pde_density.values();
  report.density_mc = mc_density.values();
  return report;
}

}  // namespace fkflow
