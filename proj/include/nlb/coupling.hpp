#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nlb/error.hpp"
#include "nlb/grid.hpp"
#include "nlb/spectral.hpp"

namespace nlb {

enum class Sign { Plus, Minus };

inline const char* to_string(Sign s) noexcept { return s == Sign::Plus ? "plus" : "minus"; }

/// How the shifted samples u(x_j +- h) are obtained.
enum class ShiftMethod {
  Auto,           ///< GridOffset when h is aligned, SpectralPhase otherwise.
  GridOffset,     ///< exact index offset; h must be a whole number of cells
  SpectralPhase,  ///< phase shift of the trigonometric interpolant; any h
};

/// The shift-combine operator (Lu)(x) = u(x + h) +- u(x - h) on a fixed grid.
class NonlocalCoupling {
 public:
  static constexpr double alignment_tolerance = 1e-12;

  NonlocalCoupling(Sign sign, double shift, Grid grid) : sign_(sign), shift_(shift), grid_(grid) {
    if (!std::isfinite(shift) || shift < 0.0 || shift > grid.period())
      throw DomainError("shift h must lie in [0, L]; got h = " + std::to_string(shift) +
                        " with L = " + std::to_string(grid.period()));
    const double cells = shift_ / grid_.spacing();
    const double nearest = std::round(cells);
    aligned_ = std::abs(cells - nearest) <= alignment_tolerance;
    offset_ = static_cast<std::ptrdiff_t>(nearest);
  }

  Sign sign() const noexcept { return sign_; }
  double shift() const noexcept { return shift_; }
  const Grid& grid() const noexcept { return grid_; }
  bool aligned() const noexcept { return aligned_; }
  /// Nearest whole number of cells in h (exact when aligned()).
  std::ptrdiff_t offset_cells() const noexcept { return offset_; }
  double sign_factor() const noexcept { return sign_ == Sign::Plus ? 1.0 : -1.0; }

  ShiftMethod resolve(ShiftMethod m) const noexcept {
    if (m != ShiftMethod::Auto) return m;
    return aligned_ ? ShiftMethod::GridOffset : ShiftMethod::SpectralPhase;
  }

  /// Same sign, shift L - h.
  NonlocalCoupling reflected() const { return NonlocalCoupling(sign_, grid_.period() - shift_, grid_); }

 private:
  Sign sign_;
  double shift_;
  Grid grid_;
  bool aligned_ = false;
  std::ptrdiff_t offset_ = 0;
};

namespace detail {

inline void shift_combine_offset(std::span<const double> u, std::span<double> out, const NonlocalCoupling& c) {
  const Grid& g = c.grid();
  if (!c.aligned()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "GridOffset needs a grid-aligned shift: h = " << c.shift() << ", dx = " << g.spacing()
        << ", nearest aligned h = " << static_cast<double>(c.offset_cells()) * g.spacing();
    throw AlignmentError(msg.str());
  }
  const std::size_t n = g.size();
  const std::size_t s = g.wrap_index(c.offset_cells());
  const double sgn = c.sign_factor();
  for (std::size_t j = 0; j < n; ++j) {
    const double ahead = u[(j + s) % n];
    const double behind = u[(j + n - s) % n];
    out[j] = ahead + sgn * behind;
  }
}

/// Multiplies each mode by exp(i k theta) +- exp(-i k theta), theta = 2 pi h / L.
inline void shift_combine_phase(std::span<const double> u, std::span<double> out, const NonlocalCoupling& c,
                                SpectralTransform& fft, std::vector<Complex>& coeffs) {
  const std::size_t n = c.grid().size();
  const std::size_t nyq = n / 2;
  coeffs.resize(nyq + 1);
  fft.forward(u, coeffs);
  const double ratio = c.shift() / c.grid().period();
  for (std::size_t k = 0; k <= nyq; ++k) {
    const double turns = std::fmod(static_cast<double>(k) * ratio, 1.0);
    const double angle = 2.0 * std::numbers::pi * turns;
    if (k == nyq) {
      // Real Nyquist mode: only the cosine part survives at the nodes.
      coeffs[k] *= (c.sign() == Sign::Plus) ? 2.0 * std::cos(angle) : 0.0;
    } else if (c.sign() == Sign::Plus) {
      coeffs[k] *= 2.0 * std::cos(angle);
    } else {
      coeffs[k] *= Complex(0.0, 2.0 * std::sin(angle));
    }
  }
  fft.inverse(coeffs, out);
}

inline void shift_combine_into(std::span<const double> u, std::span<double> out, const NonlocalCoupling& c,
                               ShiftMethod method, std::vector<Complex>& scratch) {
  if (c.resolve(method) == ShiftMethod::GridOffset) {
    shift_combine_offset(u, out, c);
  } else {
    shift_combine_phase(u, out, c, spectral_transform(c.grid().size()), scratch);
  }
}

}  // namespace detail

/// Returns u(x_j + h) +- u(x_j - h) at the field's time stamp.
inline Field shift_combine(const Field& field, const NonlocalCoupling& coupling,
                           ShiftMethod method = ShiftMethod::Auto) {
  require_finite(field, "shift_combine");
  if (!(field.grid() == coupling.grid())) throw DomainError("shift_combine: field and coupling grids differ");
  std::vector<double> out(field.size());
  std::vector<Complex> scratch;
  detail::shift_combine_into(field.values(), out, coupling, method, scratch);
  return field.with_values(std::move(out));
}

}  // namespace nlb
