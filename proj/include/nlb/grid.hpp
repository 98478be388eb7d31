#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlb/error.hpp"

namespace nlb {

/// Uniform periodic mesh x_j = j * L / N, j = 0..N-1.
class Grid {
 public:
  static constexpr std::size_t min_points = 8;

  Grid(std::size_t n_points, double period) : n_(n_points), period_(period) {
    if (n_points % 2 != 0) throw DomainError("n_points must be even (got " + std::to_string(n_points) + ")");
    if (n_points < min_points)
      throw DomainError("n_points must be at least " + std::to_string(min_points) + " (got " +
                        std::to_string(n_points) + ")");
    if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("period must be positive and finite");
    dx_ = period_ / static_cast<double>(n_);
  }

  std::size_t size() const noexcept { return n_; }
  double period() const noexcept { return period_; }
  double spacing() const noexcept { return dx_; }
  double node(std::size_t j) const noexcept { return static_cast<double>(j) * dx_; }

  std::vector<double> nodes() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
    return x;
  }

  /// Map any real x into [0, L).
  double wrap(double x) const noexcept {
    double r = std::fmod(x, period_);
    if (r < 0.0) r += period_;
    return r >= period_ ? 0.0 : r;
  }

  /// Periodic index wrap for signed offsets.
  std::size_t wrap_index(std::ptrdiff_t j) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(n_);
    return static_cast<std::size_t>(((j % n) + n) % n);
  }

  /// Index of the node at x when x is a node to within `tol` cells, otherwise -1.
  std::ptrdiff_t aligned_index(double x, double tol = 1e-12) const noexcept {
    const double s = wrap(x) / dx_;
    const double r = std::round(s);
    if (std::abs(s - r) > tol) return -1;
    return static_cast<std::ptrdiff_t>(wrap_index(static_cast<std::ptrdiff_t>(r)));
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n_ == b.n_ && a.period_ == b.period_;
  }

 private:
  std::size_t n_;
  double period_;
  double dx_;
};

inline Grid make_grid(std::size_t n_points, double period) { return Grid(n_points, period); }

/// Samples of u(., t) on a grid.
class Field {
 public:
  Field(Grid grid, std::vector<double> values, double time = 0.0)
      : grid_(grid), values_(std::move(values)), time_(time) {
    if (values_.size() != grid_.size())
      throw DomainError("field has " + std::to_string(values_.size()) + " values but grid has " +
                        std::to_string(grid_.size()) + " points");
    if (!(time >= 0.0)) throw DomainError("field time must be nonnegative");
  }

  static Field zeros(Grid grid, double time = 0.0) {
    return Field(grid, std::vector<double>(grid.size(), 0.0), time);
  }

  const Grid& grid() const noexcept { return grid_; }
  double time() const noexcept { return time_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double& operator[](std::size_t j) noexcept { return values_[j]; }

  Field with_values(std::vector<double> v) const { return Field(grid_, std::move(v), time_); }
  Field at_time(double t) const { return Field(grid_, values_, t); }

  bool is_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
  double time_;
};

inline void require_finite(const Field& f, const char* where) {
  if (!f.is_finite()) throw NonFiniteError(std::string(where) + ": field contains NaN or Inf at t = " + std::to_string(f.time()));
}

/// sup_j |a_j - b_j|
inline double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("sup_distance: size mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline double sup_distance(const Field& a, const Field& b) { return sup_distance(a.values(), b.values()); }

}  // namespace nlb
