#pragma once

#include <functional>
#include <vector>

#include "core/grid.hpp"
#include "core/kernel.hpp"
#include "core/param_flow.hpp"

namespace fkflow {

// Infinitesimal generator A = drift(q,t) d/dq + diffusion(q,t) d^2/dq^2.
// Convention, shared across the library: for dY = mu dt + sigma dW the
// generator is mu d/dq + (sigma^2/2) d^2/dq^2, so diffusion equals the
// noise intensity lambda = sigma^2/2.
struct GeneratorSpec {
  std::function<double(double, double)> drift;
  std::function<double(double, double)> diffusion;
  // When false, coefficient arrays are hoisted out of the time loop.
  bool time_dependent = false;
};

GeneratorSpec ou_generator(const OuParams& params);
// Generator of dY = -b dt + sqrt(2 lambda) dW.
GeneratorSpec wiener_generator(double drift_rate, double noise_intensity);

// Pointwise A f on the grid: second-order central differences inside,
// second-order one-sided stencils at the boundary. Needs >= 5 points.
std::vector<double> apply_generator(const GeneratorSpec& gen, const GridFunction& f, double t);

enum class PdeDirection { forward, backward };

struct PdeProblem {
  GeneratorSpec generator;
  Grid grid;
  double t_start = 0.0;
  double t_end = 1.0;
  double dt = 1e-4;
  PdeDirection direction = PdeDirection::forward;
  // Initial density (forward) or terminal function (backward), sampled on grid.
  std::vector<double> boundary_data;
  // Additional times to record; t_start and t_end are always recorded.
  std::vector<double> record_times;
};

struct PdeSolution {
  Grid grid;
  std::vector<double> times;                 // ascending
  std::vector<std::vector<double>> frames;   // frames[k] at times[k]

  const std::vector<double>& at(double t) const;  // nearest recorded frame
};

// Largest stable explicit step: dx^2 / (2 max diffusion + max |drift| dx).
double cfl_limit(const GeneratorSpec& gen, const Grid& grid, double t_start, double t_end);

// Explicit FTCS evolution of the Fokker-Planck equation in divergence form,
// d/dt p = -d/dq(drift p) + d^2/dq^2(diffusion p), with the boundary values
// held at the initial data's edge values (zero for any decayed density).
// Mass is monitored; leakage beyond 1e-4 aborts with a domain-too-small error.
PdeSolution solve_forward(const PdeProblem& problem);

// Kolmogorov backward equation integrated from the terminal condition at
// t_end down to t_start: u(q,t) = E[data(Y_end) | Y_t = q] satisfies
// d/dt u + drift du/dq + diffusion d^2u/dq^2 = 0.
PdeSolution solve_backward(const PdeProblem& problem);

// Semigroup consistency: || (P_h f - f)/h - A f ||_inf over interior grid
// points, for a kernel P_h whose cells are centered on f's grid.
double dynkin_residual(const TransitionKernel& kernel, const GeneratorSpec& gen,
                       const GridFunction& f, double h);

}  // namespace fkflow
