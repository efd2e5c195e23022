#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "core/grid.hpp"
#include "core/kernel.hpp"
#include "core/manifold.hpp"
#include "core/param_flow.hpp"
#include "core/pde.hpp"

namespace fkflow {

// Ito SDE dY = drift(Y, t) dt + vol(Y, t) dW.
struct SdeSpec {
  std::function<double(double, double)> drift;
  std::function<double(double, double)> vol;
  // Fast path for time-independent affine dynamics drift = a0 + a1 q with
  // constant volatility c0; set by the named constructors below.
  struct Affine {
    double a0, a1, c0;
  };
  std::optional<Affine> affine;
};

SdeSpec ou_sde(const OuParams& params);
// dY = -b dt + sqrt(2 lambda) dW.
SdeSpec wiener_sde(double drift_rate, double noise_intensity);

// Ensemble of sampled paths, stored at the recorded times only.
struct PathEnsemble {
  std::vector<double> times;   // ascending; always includes t_start and t_end
  std::size_t n_paths = 0;
  std::vector<double> states;  // n_paths x times.size(), row-major by path
  std::uint64_t seed = 0;
  double dt = 0.0;

  double state(std::size_t path, std::size_t time_index) const {
    return states[path * times.size() + time_index];
  }
  std::span<const double> path(std::size_t p) const {
    return std::span<const double>(states.data() + p * times.size(), times.size());
  }
  // All paths at a recorded time.
  std::vector<double> column(std::size_t time_index) const;
};

// Euler-Maruyama sampler: Y_{k+1} = Y_k + drift dt + vol sqrt(dt) xi with
// xi ~ N(0,1) drawn from the path's own counter-based substream, so the
// ensemble is bit-reproducible for fixed (seed, n_paths, dt). record_times
// trims storage; pass {} to keep every step.
PathEnsemble euler_maruyama(const SdeSpec& sde, double q0, double t_start, double t_end,
                            double dt, std::size_t n_paths, std::uint64_t seed,
                            const std::vector<double>& record_times = {});

// Same dynamics with initial states drawn from N(mean0, var0); the initial
// draw uses each path's substream before any step noise.
PathEnsemble euler_maruyama_gaussian_start(const SdeSpec& sde, double mean0, double var0,
                                           double t_start, double t_end, double dt,
                                           std::size_t n_paths, std::uint64_t seed,
                                           const std::vector<double>& record_times = {});

struct FkEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
};

// Feynman-Kac estimator: sample mean and standard error of terminal(Y_end)
// over paths started at Y_t = q.
FkEstimate fk_estimate(const SdeSpec& sde, const std::function<double(double)>& terminal,
                       double q, double t, double t_end, double dt, std::size_t n_paths,
                       std::uint64_t seed);

// Empirical transition kernel: row i is the binned distribution of Y_{t1}
// given Y_{t0} = midpoint of cell i (out-of-range states clamp into the end
// cells). Errors out when more than 0.1% of the total mass leaves the cells.
TransitionKernel estimate_kernel(const SdeSpec& sde, const CellGrid& cells, double t0,
                                 double t1, double dt, std::size_t n_per_cell,
                                 std::uint64_t seed);

// Gaussian kernel density estimate evaluated on the grid. The samples are
// binned at the grid spacing and convolved with a discrete normal kernel of
// the given bandwidth (Silverman's rule when bandwidth <= 0).
GridDensity kde_density(std::span<const double> samples, const Grid& grid,
                        double bandwidth = 0.0);
double silverman_bandwidth(std::span<const double> samples);

// Process families covered by the functor verification.
struct WienerProcess {
  double drift_rate;
  double noise_intensity;
};
using ProcessSpec = std::variant<OuParams, WienerProcess>;

ParamPoint process_moments(const ProcessSpec& process, const ParamPoint& x0, double t);
GeneratorSpec process_generator(const ProcessSpec& process);
SdeSpec process_sde(const ProcessSpec& process);

struct FunctorOptions {
  double dx = 0.01;
  double dt = 1e-3;           // Euler-Maruyama step
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1234567;
  double tol_param_pde = 1e-2;
  double tol_param_mc = 0.02;
  double tol_pde_mc = 0.02;
};

struct FunctorReport {
  double time = 0.0;
  double l1_param_pde = 0.0;
  double l1_param_mc = 0.0;
  double l1_pde_mc = 0.0;
  // A-priori L1 error scale of the Monte Carlo density estimate (sampling
  // plus smoothing bias), computed from the parameter-route density.
  double mc_l1_bound = 0.0;
  double kde_bandwidth = 0.0;
  bool pass_param_pde = false;
  bool pass_param_mc = false;
  bool pass_pde_mc = false;
  bool passed = false;
  Grid grid;
  std::vector<double> density_param;
  std::vector<double> density_pde;
  std::vector<double> density_mc;
};

// The three-route commutation experiment: evolve parameters and map to a
// density (parameter route), evolve the initial density with the
// Fokker-Planck solver (PDE route), and estimate the density from sampled
// paths (Monte Carlo route); report pairwise L1 distances on a common grid.
FunctorReport verify_functor(const ProcessSpec& process, const ParamPoint& x0, double t,
                             const FunctorOptions& options = {});

}  // namespace fkflow
