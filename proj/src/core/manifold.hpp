#pragma once

#include <functional>
#include <span>
#include <vector>

#include "core/grid.hpp"
#include "core/param_flow.hpp"

namespace fkflow {

// Ordered list of scalar potentials J_i.
struct PotentialSet {
  std::vector<std::function<double(double)>> potentials;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

enum class BoundaryPolicy {
  // The integrand must have decayed below 1e-12 of its maximum at the
  // domain edges; otherwise the domain is reported as too small.
  require_decay,
  // Compactly supported families; no decay check.
  allow_compact,
};

// log of integral exp(-weights . J(q)) dq over the domain, by trapezoid
// quadrature with spacing dx (max-shifted for overflow safety).
double log_partition(const PotentialSet& potentials, std::span<const double> weights,
                     Interval domain, double dx,
                     BoundaryPolicy policy = BoundaryPolicy::require_decay);

// Operations that build densities from parameters reject variances below
// this floor to keep delta-like densities out of the quadrature downstream.
inline constexpr double kVarianceFloor = 1e-12;
inline constexpr std::size_t kDefaultGridPoints = 4001;

// Default working grid for a Gaussian-family density: 10 standard deviations
// either side of the mean, 4001 points.
Grid gaussian_grid(double mean, double variance);

double gaussian_pdf(double q, double mean, double variance);

// Exponential-family density p(q) = exp(-weights . J(q) - log Z) on a
// bounded domain. The log-partition value is cached at construction.
class ExpFamilyDensity {
 public:
  ExpFamilyDensity(PotentialSet potentials, std::vector<double> weights,
                   Interval domain, double quadrature_dx,
                   BoundaryPolicy policy = BoundaryPolicy::require_decay);

  double operator()(double q) const;
  double log_density(double q) const;

  const std::vector<double>& weights() const { return weights_; }
  Interval domain() const { return domain_; }
  double log_partition_value() const { return log_partition_; }

  // Samples onto a grid and renormalizes.
  GridDensity discretize(const Grid& grid) const;
  GridDensity discretize_default() const;

  double quadrature_mean() const;
  double quadrature_variance() const;

 private:
  PotentialSet potentials_;
  std::vector<double> weights_;
  Interval domain_;
  double quadrature_dx_;
  double log_partition_;
};

// The map F from parameters to densities. Gaussian case: x = (m, s) with
// s > 0 becomes the (q, q^2) family with weights (-m/s, 1/(2s)), i.e. N(m, s).
ExpFamilyDensity density_from_params(const ParamPoint& x);

// Differential entropy -sum p log p dx (trapezoid), with 0 log 0 := 0.
// Rejects unnormalized input.
double entropy(const GridDensity& p);

// Pushes a parameter path forward to a density path: element i is
// density_from_params(flow(x0, times[i])). Times must be ascending and >= 0.
std::vector<ExpFamilyDensity> pushforward_path(const FlowSpec& flow, const ParamPoint& x0,
                                               const std::vector<double>& times);

}  // namespace fkflow
