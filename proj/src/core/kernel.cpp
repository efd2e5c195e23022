#include "core/kernel.hpp"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace fkflow {

CellGrid::CellGrid(double lo, double width, std::size_t n_cells)
    : lo(lo), width(width), n_cells(n_cells) {
  require_finite(lo, "cell grid lo");
  require(width > 0.0, "cell width must be positive");
  require(n_cells >= 1, "cell grid needs at least one cell");
}

CellGrid CellGrid::from_range(double lo, double hi, std::size_t n_cells) {
  require(hi > lo, "cell range requires hi > lo");
  require(n_cells >= 1, "cell grid needs at least one cell");
  return CellGrid(lo, (hi - lo) / static_cast<double>(n_cells), n_cells);
}

CellGrid CellGrid::centered_on(const Grid& grid) {
  return CellGrid(grid.lo - 0.5 * grid.dx(), grid.dx(), grid.n);
}

std::ptrdiff_t CellGrid::cell_index(double q) const {
  if (q < lo || q >= hi()) return -1;
  auto idx = static_cast<std::ptrdiff_t>((q - lo) / width);
  if (idx >= static_cast<std::ptrdiff_t>(n_cells)) idx = static_cast<std::ptrdiff_t>(n_cells) - 1;
  return idx;
}

TransitionKernel::TransitionKernel(std::size_t n, std::vector<double> row_major, double step)
    : n_(n), step_(step), data_(std::move(row_major)) {
  require(n >= 1, "kernel must have at least one state");
  require(data_.size() == n * n, "kernel data size does not match state count");
  require(step >= 0.0, "kernel step must be nonnegative");
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = data_[i * n_ + j];
      require_finite(v, "kernel entry");
      require(v >= 0.0, "kernel entries must be nonnegative");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= kRowSumTolerance,
            "kernel row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
}

TransitionKernel TransitionKernel::identity(std::size_t n, double step) {
  std::vector<double> data(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) data[i * n + i] = 1.0;
  return TransitionKernel(n, std::move(data), step);
}

std::span<const double> TransitionKernel::row(std::size_t i) const {
  require(i < n_, "kernel row index out of range");
  return std::span<const double>(data_.data() + i * n_, n_);
}

std::vector<double> TransitionKernel::apply_to_function(std::span<const double> f) const {
  require(f.size() == n_, "function length does not match kernel");
  std::vector<double> out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* r = data_.data() + i * n_;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += r[j] * f[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> TransitionKernel::apply_to_distribution(std::span<const double> rho) const {
  require(rho.size() == n_, "distribution length does not match kernel");
  std::vector<double> out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double w = rho[i];
    if (w == 0.0) continue;
    const double* r = data_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j) out[j] += w * r[j];
  }
  return out;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

}  // namespace

TransitionKernel exact_ou_kernel(const OuParams& params, const CellGrid& cells, double step,
                                 KernelDiscretization disc) {
  require(step >= 0.0, "kernel step must be nonnegative");
  const std::size_t n = cells.n_cells;
  std::vector<double> data(n * n, 0.0);
  const double decay = std::exp(-params.mean_reversion * step);
  const double var = params.stationary_variance() * (1.0 - decay * decay);
  const double sd = std::sqrt(var);

  for (std::size_t i = 0; i < n; ++i) {
    double* r = data.data() + i * n;
    const double mean = decay * cells.midpoint(i) +
                        params.stationary_mean * (1.0 - decay);
    if (!(sd > 0.0)) {
      // Degenerate step: all mass lands at the (clamped) mean.
      auto j = cells.cell_index(mean);
      if (j < 0) j = mean < cells.lo ? 0 : static_cast<std::ptrdiff_t>(n) - 1;
      r[j] = 1.0;
      continue;
    }
    double sum = 0.0;
    if (disc == KernelDiscretization::cell_mass) {
      double prev = normal_cdf((cells.edge(0) - mean) / sd);
      for (std::size_t j = 0; j < n; ++j) {
        const double next = normal_cdf((cells.edge(j + 1) - mean) / sd);
        r[j] = next - prev;
        prev = next;
      }
      // Clamp the truncated tails into the end cells so rows stay stochastic.
      r[0] += normal_cdf((cells.edge(0) - mean) / sd);
      r[n - 1] += 1.0 - normal_cdf((cells.edge(n) - mean) / sd);
      for (std::size_t j = 0; j < n; ++j) sum += r[j];
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        const double z = (cells.midpoint(j) - mean) / sd;
        r[j] = std::exp(-0.5 * z * z);
        sum += r[j];
      }
    }
    require(sum > 0.0, "exact kernel row degenerate; widen the cell range");
    for (std::size_t j = 0; j < n; ++j) r[j] /= sum;
  }
  return TransitionKernel(n, std::move(data), step);
}

TransitionKernel compose(const TransitionKernel& first, const TransitionKernel& then) {
  require(first.size() == then.size(), "cannot compose kernels of different sizes");
  const std::size_t n = first.size();
  std::vector<double> data(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = first.row(i);
    double* out = data.data() + i * n;
    for (std::size_t m = 0; m < n; ++m) {
      const double w = ri[m];
      if (w == 0.0) continue;
      const auto rm = then.row(m);
      for (std::size_t j = 0; j < n; ++j) out[j] += w * rm[j];
    }
    // Renormalize away accumulated roundoff; the row sum is 1 + O(n eps).
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += out[j];
    for (std::size_t j = 0; j < n; ++j) out[j] /= sum;
  }
  return TransitionKernel(n, std::move(data), first.step() + then.step());
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), "total variation: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

double sewing_check(const TransitionKernel& k1, const TransitionKernel& k2,
                    const TransitionKernel& k12) {
  require(k1.size() == k2.size() && k1.size() == k12.size(),
          "sewing check: incompatible kernel shapes");
  const double step_gap = std::abs((k1.step() + k2.step()) - k12.step());
  require(step_gap <= 1e-9 * std::max(1.0, k12.step()),
          "sewing check: time intervals do not compose");
  const TransitionKernel chained = compose(k1, k2);
  double residual = 0.0;
  for (std::size_t i = 0; i < k12.size(); ++i)
    residual = std::max(residual, total_variation(chained.row(i), k12.row(i)));
  return residual;
}

}  // namespace fkflow
