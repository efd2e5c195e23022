#include "core/grid.hpp"

#include <cmath>
#include <cstdio>

#include "core/errors.hpp"

namespace fkflow {

Grid::Grid(double lo, double hi, std::size_t n) : lo(lo), hi(hi), n(n) {
  require_finite(lo, "grid lo");
  require_finite(hi, "grid hi");
  require(hi > lo, "grid requires hi > lo");
  require(n >= 2, "grid requires at least 2 points");
}

Grid Grid::with_spacing(double lo, double hi, double dx) {
  require(dx > 0.0, "grid spacing must be positive");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / dx)) + 1;
  return Grid(lo, hi, n < 2 ? 2 : n);
}

std::vector<double> Grid::points() const {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = point(i);
  return p;
}

double trapezoid(const Grid& grid, std::span<const double> values) {
  require(values.size() == grid.n, "trapezoid: value count does not match grid");
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * grid.dx();
}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid(grid), values(std::move(values)) {
  require(this->values.size() == grid.n, "grid function: value count does not match grid");
}

GridDensity::GridDensity(Grid grid, std::vector<double> values)
    : fn_(grid, std::move(values)) {
  for (double v : fn_.values) {
    require_finite(v, "density value");
    require(v >= 0.0, "density values must be nonnegative");
  }
  const double mass = fn_.integral();
  require(std::abs(mass - 1.0) <= kNormTolerance,
          "density is not normalized: integral = " + std::to_string(mass));
}

GridDensity GridDensity::normalized(Grid grid, std::vector<double> values) {
  GridFunction fn(grid, std::move(values));
  const double mass = fn.integral();
  require(std::isfinite(mass) && mass > 0.0,
          "cannot normalize: integral = " + std::to_string(mass));
  for (double& v : fn.values) {
    v /= mass;
    if (v < 0.0) {
      require(v > -kNormTolerance, "density values must be nonnegative");
      v = 0.0;
    }
  }
  return GridDensity(std::move(fn));
}

double GridDensity::mean() const {
  std::vector<double> qp(grid().n);
  for (std::size_t i = 0; i < grid().n; ++i) qp[i] = grid().point(i) * values()[i];
  return trapezoid(grid(), qp);
}

double GridDensity::variance() const {
  const double m = mean();
  std::vector<double> qqp(grid().n);
  for (std::size_t i = 0; i < grid().n; ++i) {
    const double d = grid().point(i) - m;
    qqp[i] = d * d * values()[i];
  }
  return trapezoid(grid(), qqp);
}

double l1_distance(const GridFunction& a, const GridFunction& b) {
  require(a.grid == b.grid, "l1_distance: grids differ");
  std::vector<double> diff(a.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(a.values[i] - b.values[i]);
  return trapezoid(a.grid, diff);
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "linf_distance: sizes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string to_csv(const GridDensity& density) {
  std::string out = "q,p\n";
  for (std::size_t i = 0; i < density.grid().n; ++i) {
    out += format_double(density.grid().point(i));
    out += ',';
    out += format_double(density.values()[i]);
    out += '\n';
  }
  return out;
}

std::string to_csv(std::span<const double> times, std::span<const GridFunction> frames) {
  require(times.size() == frames.size(), "to_csv: times and frames differ in length");
  std::string out = "t,q,value\n";
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    for (std::size_t i = 0; i < f.grid.n; ++i) {
      out += format_double(times[k]);
      out += ',';
      out += format_double(f.grid.point(i));
      out += ',';
      out += format_double(f.values[i]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace fkflow
