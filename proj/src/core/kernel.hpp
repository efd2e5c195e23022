#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/grid.hpp"
#include "core/param_flow.hpp"

namespace fkflow {

// Uniform partition into cells: edges at lo + i * width, i = 0 .. n_cells.
struct CellGrid {
  double lo = 0.0;
  double width = 1.0;
  std::size_t n_cells = 1;

  CellGrid() = default;
  CellGrid(double lo, double width, std::size_t n_cells);
  static CellGrid from_range(double lo, double hi, std::size_t n_cells);
  // Cells of width grid.dx() centered on the grid points.
  static CellGrid centered_on(const Grid& grid);

  double hi() const { return lo + width * static_cast<double>(n_cells); }
  double edge(std::size_t i) const { return lo + width * static_cast<double>(i); }
  double midpoint(std::size_t i) const { return lo + width * (static_cast<double>(i) + 0.5); }
  // Index of the cell containing q, or -1 when q lies outside the range.
  std::ptrdiff_t cell_index(double q) const;
};

inline constexpr double kRowSumTolerance = 1e-12;

// Row-stochastic transition matrix over grid cells or discrete states.
// Row i is the distribution of the state after `step` time units given
// start in cell/state i.
class TransitionKernel {
 public:
  TransitionKernel(std::size_t n, std::vector<double> row_major, double step);
  static TransitionKernel identity(std::size_t n, double step = 0.0);

  std::size_t size() const { return n_; }
  double step() const { return step_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const;

  // Backward action on functions: (P f)(i) = sum_j P_ij f(j).
  std::vector<double> apply_to_function(std::span<const double> f) const;
  // Forward action on distributions: (rho P)(j) = sum_i rho_i P_ij.
  std::vector<double> apply_to_distribution(std::span<const double> rho) const;

 private:
  std::size_t n_;
  double step_;
  std::vector<double> data_;
};

enum class KernelDiscretization {
  // Entries are exact cell probabilities (normal CDF differences); the
  // tails beyond the range are clamped into the end cells.
  cell_mass,
  // Entries are density values at cell midpoints times the width,
  // renormalized per row. Preferred when the kernel is well resolved and
  // quadrature error must vanish faster than the step.
  midpoint,
};

// Exact OU transition kernel over a time step:
// Y_{t+step} | Y_t = q ~ N(e^{-b step} q + k (1 - e^{-b step}),
//                          (lambda/b)(1 - e^{-2 b step})),
// discretized on the cells with start states at cell midpoints.
TransitionKernel exact_ou_kernel(const OuParams& params, const CellGrid& cells, double step,
                                 KernelDiscretization disc = KernelDiscretization::cell_mass);

// Chapman-Kolmogorov composition: row i of the result is the distribution
// after `first` then `then`.
TransitionKernel compose(const TransitionKernel& first, const TransitionKernel& then);

// Total variation distance (1/2) sum |p - q| of two distributions.
double total_variation(std::span<const double> p, std::span<const double> q);

// Max row-wise total-variation residual of compose(k1, k2) against k12.
double sewing_check(const TransitionKernel& k1, const TransitionKernel& k2,
                    const TransitionKernel& k12);

}  // namespace fkflow
