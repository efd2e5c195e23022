#include "core/param_flow.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace fkflow {

ParamPoint::ParamPoint(std::vector<double> c) : coords(std::move(c)) {
  require(!coords.empty(), "parameter point must have dimension >= 1");
}

ParamPoint::ParamPoint(double mean, double variance) : coords{mean, variance} {}

double ParamPoint::mean() const {
  require(dim() == 2, "mean() requires a (mean, variance) point");
  return coords[0];
}

double ParamPoint::variance() const {
  require(dim() == 2, "variance() requires a (mean, variance) point");
  return coords[1];
}

void ParamPoint::check_finite() const {
  for (double c : coords) require_finite(c, "parameter coordinate");
}

OuParams::OuParams(double b, double k, double lambda)
    : mean_reversion(b), stationary_mean(k), noise_intensity(lambda) {
  require_finite(b, "mean reversion rate");
  require_finite(k, "stationary mean");
  require_finite(lambda, "noise intensity");
  require(b > 0.0, "mean reversion rate must be positive");
  require(lambda > 0.0, "noise intensity must be positive");
}

namespace {

void check_moment_inputs(const ParamPoint& x0, double t) {
  require_finite(t, "time");
  require(t >= 0.0, "time must be nonnegative");
  x0.check_finite();
  require(x0.dim() == 2, "moment flows act on (mean, variance) points");
  require(x0.variance() >= 0.0, "initial variance must be nonnegative");
}

}  // namespace

ParamPoint ou_moment_flow(const OuParams& params, const ParamPoint& x0, double t) {
  check_moment_inputs(x0, t);
  const double decay = std::exp(-params.mean_reversion * t);
  const double m = decay * x0.mean() + params.stationary_mean * (1.0 - decay);
  // s = M2 - m^2 for the exact second-moment solution; the m0- and
  // k-dependent terms cancel algebraically, leaving the two-term relaxation.
  const double decay2 = decay * decay;
  const double s = decay2 * x0.variance() + params.stationary_variance() * (1.0 - decay2);
  return ParamPoint(m, s);
}

ParamPoint wiener_moment_flow(double drift_rate, double noise_intensity,
                              const ParamPoint& x0, double t) {
  check_moment_inputs(x0, t);
  require_finite(drift_rate, "drift rate");
  require(noise_intensity > 0.0, "noise intensity must be positive");
  return ParamPoint(x0.mean() - drift_rate * t,
                    x0.variance() + 2.0 * noise_intensity * t);
}

ParamPoint integrate_flow(const FlowSpec& spec, const ParamPoint& x0, double t, double dt) {
  require(static_cast<bool>(spec.vector_field), "flow spec has no vector field");
  require(dt > 0.0, "integration step must be positive");
  require_finite(t, "time");
  require(t >= 0.0, "time must be nonnegative");
  x0.check_finite();
  if (t == 0.0) return x0;

  const double raw_steps = t / dt;
  require(raw_steps <= 1e9, "integration step count overflow (t/dt > 1e9)");
  const auto n_steps = static_cast<std::size_t>(std::ceil(raw_steps - 1e-9));
  const double h = t / static_cast<double>(n_steps);
  const std::size_t d = x0.dim();

  std::vector<double> y = x0.coords;
  std::vector<double> stage(d);
  auto field = [&](const std::vector<double>& state, double tau) {
    auto v = spec.vector_field(ParamPoint(state), tau);
    require(v.size() == d, "vector field dimension mismatch");
    return v;
  };

  for (std::size_t step = 0; step < n_steps; ++step) {
    const double tau = h * static_cast<double>(step);
    const auto k1 = field(y, tau);
    for (std::size_t i = 0; i < d; ++i) stage[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = field(stage, tau + 0.5 * h);
    for (std::size_t i = 0; i < d; ++i) stage[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = field(stage, tau + 0.5 * h);
    for (std::size_t i = 0; i < d; ++i) stage[i] = y[i] + h * k3[i];
    const auto k4 = field(stage, tau + h);
    for (std::size_t i = 0; i < d; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    for (double v : y)
      if (!std::isfinite(v))
        throw NumericError("integration produced a non-finite state at t = " +
                           std::to_string(tau + h));
  }
  return ParamPoint(std::move(y));
}

ParamPoint evolve(const FlowSpec& spec, const ParamPoint& x0, double t, double dt) {
  if (spec.closed_form) return (*spec.closed_form)(x0, t);
  return integrate_flow(spec, x0, t, dt);
}

double check_group_law(const FlowSpec& spec, const ParamPoint& x0, double t,
                       double s, double dt) {
  require(spec.time_homogeneous,
          "group law check requires a time-homogeneous flow");
  require(t >= 0.0 && s >= 0.0, "group law times must be nonnegative");
  const ParamPoint via = evolve(spec, evolve(spec, x0, t, dt), s, dt);
  const ParamPoint direct = evolve(spec, x0, t + s, dt);
  require(via.dim() == direct.dim(), "flow changed dimension");
  double residual = 0.0;
  for (std::size_t i = 0; i < via.dim(); ++i)
    residual = std::max(residual, std::abs(via.coords[i] - direct.coords[i]));
  return residual;
}

FlowSpec ou_flow(const OuParams& params) {
  FlowSpec spec;
  spec.vector_field = [params](const ParamPoint& x, double) {
    const double m = x.coords.at(0);
    const double s = x.coords.at(1);
    return std::vector<double>{
        -params.mean_reversion * (m - params.stationary_mean),
        -2.0 * params.mean_reversion * s + 2.0 * params.noise_intensity};
  };
  spec.closed_form = [params](const ParamPoint& x, double t) {
    return ou_moment_flow(params, x, t);
  };
  spec.time_homogeneous = true;
  return spec;
}

FlowSpec wiener_flow(double drift_rate, double noise_intensity) {
  FlowSpec spec;
  spec.vector_field = [drift_rate, noise_intensity](const ParamPoint&, double) {
    return std::vector<double>{-drift_rate, 2.0 * noise_intensity};
  };
  spec.closed_form = [drift_rate, noise_intensity](const ParamPoint& x, double t) {
    return wiener_moment_flow(drift_rate, noise_intensity, x, t);
  };
  spec.time_homogeneous = true;
  return spec;
}

}  // namespace fkflow
