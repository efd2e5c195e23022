#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fkflow {

// Uniform 1-D grid of n points spanning [lo, hi].
struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 2;

  Grid() = default;
  Grid(double lo, double hi, std::size_t n);
  // Chooses n so the spacing is as close as possible to dx (hi is kept).
  static Grid with_spacing(double lo, double hi, double dx);

  double dx() const { return (hi - lo) / static_cast<double>(n - 1); }
  double point(std::size_t i) const { return lo + static_cast<double>(i) * dx(); }
  std::vector<double> points() const;
  bool operator==(const Grid&) const = default;
};

double trapezoid(const Grid& grid, std::span<const double> values);

// Real-valued function sampled on a grid.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(Grid grid, std::vector<double> values);

  double integral() const { return trapezoid(grid, values); }

  template <class F>
  static GridFunction sample(const Grid& g, F&& f) {
    std::vector<double> v(g.n);
    for (std::size_t i = 0; i < g.n; ++i) v[i] = f(g.point(i));
    return GridFunction(g, std::move(v));
  }
};

// Probability density sampled on a grid: nonnegative values whose trapezoid
// integral is 1 within kNormTolerance.
class GridDensity {
 public:
  static constexpr double kNormTolerance = 1e-8;

  // Validates nonnegativity and normalization.
  GridDensity(Grid grid, std::vector<double> values);
  // Rescales the values so the trapezoid integral is exactly 1.
  static GridDensity normalized(Grid grid, std::vector<double> values);

  const Grid& grid() const { return fn_.grid; }
  const std::vector<double>& values() const { return fn_.values; }
  const GridFunction& as_function() const { return fn_; }
  double integral() const { return fn_.integral(); }
  // Quadrature moments.
  double mean() const;
  double variance() const;

 private:
  explicit GridDensity(GridFunction fn) : fn_(std::move(fn)) {}
  GridFunction fn_;
};

double l1_distance(const GridFunction& a, const GridFunction& b);
double linf_distance(std::span<const double> a, std::span<const double> b);

// CSV with columns q,p.
std::string to_csv(const GridDensity& density);
// CSV with columns t,q,value for a time-indexed family of grid functions.
std::string to_csv(std::span<const double> times, std::span<const GridFunction> frames);

// Formats a double with enough digits to round-trip (stable across runs).
std::string format_double(double x);

}  // namespace fkflow
