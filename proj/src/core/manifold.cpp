#include "core/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/errors.hpp"

namespace fkflow {

Grid gaussian_grid(double mean, double variance) {
  require(variance > 0.0, "gaussian grid requires positive variance");
  const double half_width = 10.0 * std::sqrt(variance);
  return Grid(mean - half_width, mean + half_width, kDefaultGridPoints);
}

double gaussian_pdf(double q, double mean, double variance) {
  const double z = q - mean;
  return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

namespace {

double neg_weighted_potential(const PotentialSet& potentials,
                              std::span<const double> weights, double q) {
  double e = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) e -= weights[i] * potentials.potentials[i](q);
  return e;
}

}  // namespace

double log_partition(const PotentialSet& potentials, std::span<const double> weights,
                     Interval domain, double dx, BoundaryPolicy policy) {
  require(!potentials.potentials.empty(), "potential set must be nonempty");
  require(weights.size() == potentials.potentials.size(),
          "weight count does not match potential count");
  require(domain.hi > domain.lo, "log_partition: empty domain");
  require(dx > 0.0, "log_partition: quadrature spacing must be positive");

  const Grid grid = Grid::with_spacing(domain.lo, domain.hi, dx);
  std::vector<double> exponent(grid.n);
  double max_e = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.n; ++i) {
    exponent[i] = neg_weighted_potential(potentials, weights, grid.point(i));
    require_finite(exponent[i], "log-partition exponent");
    max_e = std::max(max_e, exponent[i]);
  }
  if (policy == BoundaryPolicy::require_decay) {
    // exp(e - max) < 1e-12 at both edges.
    const double cutoff = max_e + std::log(1e-12);
    if (exponent.front() >= cutoff || exponent.back() >= cutoff)
      throw NumericError("log_partition: integrand does not decay at the domain "
                         "boundary; domain too small");
  }
  std::vector<double> shifted(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) shifted[i] = std::exp(exponent[i] - max_e);
  const double integral = trapezoid(grid, shifted);
  require(integral > 0.0 && std::isfinite(integral), "log_partition: degenerate integral");
  return max_e + std::log(integral);
}

ExpFamilyDensity::ExpFamilyDensity(PotentialSet potentials, std::vector<double> weights,
                                   Interval domain, double quadrature_dx, BoundaryPolicy policy)
    : potentials_(std::move(potentials)),
      weights_(std::move(weights)),
      domain_(domain),
      quadrature_dx_(quadrature_dx),
      log_partition_(log_partition(potentials_, weights_, domain_, quadrature_dx_, policy)) {}

double ExpFamilyDensity::log_density(double q) const {
  return neg_weighted_potential(potentials_, weights_, q) - log_partition_;
}

double ExpFamilyDensity::operator()(double q) const { return std::exp(log_density(q)); }

GridDensity ExpFamilyDensity::discretize(const Grid& grid) const {
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = (*this)(grid.point(i));
  return GridDensity::normalized(grid, std::move(v));
}

GridDensity ExpFamilyDensity::discretize_default() const {
  return discretize(Grid::with_spacing(domain_.lo, domain_.hi, quadrature_dx_));
}

double ExpFamilyDensity::quadrature_mean() const { return discretize_default().mean(); }

double ExpFamilyDensity::quadrature_variance() const { return discretize_default().variance(); }

ExpFamilyDensity density_from_params(const ParamPoint& x) {
  x.check_finite();
  require(x.dim() == 2, "density_from_params expects a (mean, variance) point");
  const double m = x.mean();
  const double s = x.variance();
  require(s >= kVarianceFloor,
          "variance below floor (" + std::to_string(s) + " < 1e-12)");
  PotentialSet potentials;
  potentials.potentials = {[](double q) { return q; }, [](double q) { return q * q; }};
  // exp(-w1 q - w2 q^2) proportional to N(m, s).
  std::vector<double> weights = {-m / s, 0.5 / s};
  const Grid grid = gaussian_grid(m, s);
  return ExpFamilyDensity(std::move(potentials), std::move(weights),
                          Interval{grid.lo, grid.hi}, grid.dx());
}

double entropy(const GridDensity& p) {
  // GridDensity guarantees normalization within tolerance; recheck so that
  // hand-built inputs routed through normalized() cannot drift.
  const double mass = p.integral();
  require(std::abs(mass - 1.0) <= GridDensity::kNormTolerance,
          "entropy requires a normalized density");
  std::vector<double> integrand(p.grid().n);
  for (std::size_t i = 0; i < p.grid().n; ++i) {
    const double v = p.values()[i];
    integrand[i] = v > 0.0 ? -v * std::log(v) : 0.0;
  }
  return trapezoid(p.grid(), integrand);
}

std::vector<ExpFamilyDensity> pushforward_path(const FlowSpec& flow, const ParamPoint& x0,
                                               const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] >= 0.0, "pushforward times must be nonnegative");
    if (i > 0)
      require(times[i] >= times[i - 1], "pushforward times must be ascending");
  }
  std::vector<ExpFamilyDensity> path;
  path.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    try {
      path.push_back(density_from_params(evolve(flow, x0, times[i])));
    } catch (const Error& e) {
      throw Error("pushforward_path failed at time index " + std::to_string(i) +
                  " (t = " + std::to_string(times[i]) + "): " + e.what());
    }
  }
  return path;
}

}  // namespace fkflow
