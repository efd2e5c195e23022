#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace fkflow {

// A point in parameter space: the sufficient statistics that identify a
// density. Gaussian families use coords = (mean, variance).
struct ParamPoint {
  std::vector<double> coords;

  ParamPoint() = default;
  explicit ParamPoint(std::vector<double> c);
  ParamPoint(double mean, double variance);

  std::size_t dim() const { return coords.size(); }
  // Gaussian accessors; require dim() == 2.
  double mean() const;
  double variance() const;
  void check_finite() const;
};

// Ornstein-Uhlenbeck process dY = -b (Y - k) dt + sqrt(2 lambda) dW.
// The noise intensity satisfies lambda = sigma^2 / 2; this convention is
// shared by every module (generators, PDE solvers, samplers).
struct OuParams {
  double mean_reversion;   // b > 0
  double stationary_mean;  // k
  double noise_intensity;  // lambda > 0

  OuParams(double b, double k, double lambda);
  double stationary_variance() const { return noise_intensity / mean_reversion; }
};

// A flow on parameter space: a vector field plus, when known, its closed-form
// solution map (x0, t) -> x(t). Set time_homogeneous = false for fields that
// read the time argument; the group-law check refuses those.
struct FlowSpec {
  std::function<std::vector<double>(const ParamPoint&, double)> vector_field;
  std::optional<std::function<ParamPoint(const ParamPoint&, double)>> closed_form;
  bool time_homogeneous = true;
};

inline constexpr double kDefaultFlowStep = 1e-3;

// Closed-form OU moments: m(t) = e^{-bt} m0 + k (1 - e^{-bt}) and the exact
// variance obtained from the second-moment equation, s = M2 - m^2, which
// reduces to s(t) = s0 e^{-2bt} + (lambda/b)(1 - e^{-2bt}).
ParamPoint ou_moment_flow(const OuParams& params, const ParamPoint& x0, double t);

// Drifted Wiener moments for dY = -b dt + sqrt(2 lambda) dW:
// (m0 - b t, s0 + 2 lambda t). The 2*lambda*t variance follows the
// Fokker-Planck solution (Ito isometry).
ParamPoint wiener_moment_flow(double drift_rate, double noise_intensity,
                              const ParamPoint& x0, double t);

// Fixed-step RK4 integration of spec.vector_field from x0 over [0, t].
ParamPoint integrate_flow(const FlowSpec& spec, const ParamPoint& x0, double t,
                          double dt = kDefaultFlowStep);

// Sup-norm residual of phi_s(phi_t(x0)) vs phi_{t+s}(x0). Rejects
// time-dependent vector fields, for which the one-parameter group law
// does not apply.
double check_group_law(const FlowSpec& spec, const ParamPoint& x0, double t,
                       double s, double dt = kDefaultFlowStep);

// Evaluates closed_form when present, otherwise integrates the field.
ParamPoint evolve(const FlowSpec& spec, const ParamPoint& x0, double t,
                  double dt = kDefaultFlowStep);

FlowSpec ou_flow(const OuParams& params);
FlowSpec wiener_flow(double drift_rate, double noise_intensity);

}  // namespace fkflow
