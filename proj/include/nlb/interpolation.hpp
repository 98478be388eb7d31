#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "nlb/grid.hpp"
#include "nlb/spectral.hpp"

namespace nlb {

enum class Interpolation {
  CatmullRom,  ///< periodic cubic through the four surrounding nodes
  Spectral,    ///< trigonometric interpolant, O(N) per point
};

/// Periodic Catmull-Rom interpolation of nodal values f at any real x.
inline double catmull_rom(std::span<const double> f, double x, const Grid& g) {
  const std::size_t n = f.size();
  const double s = g.wrap(x) / g.spacing();
  const double fl = std::floor(s);
  const double w = s - fl;
  const auto i = static_cast<std::ptrdiff_t>(fl);
  const double p0 = f[g.wrap_index(i - 1)];
  const double p1 = f[g.wrap_index(i) % n];
  const double p2 = f[g.wrap_index(i + 1)];
  const double p3 = f[g.wrap_index(i + 2)];
  return p1 + 0.5 * w * (p2 - p0 + w * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + w * (3.0 * (p1 - p2) + p3 - p0)));
}

/// Trigonometric interpolant of nodal data, evaluable anywhere.
class TrigInterpolant {
 public:
  TrigInterpolant(std::span<const double> f, const Grid& g) : period_(g.period()) {
    auto& fft = spectral_transform(g.size());
    coeffs_ = fft.forward(f);
  }

  double operator()(double x) const {
    const std::size_t nyq = coeffs_.size() - 1;
    const double theta = 2.0 * std::numbers::pi * x / period_;
    double v = coeffs_[0].real();
    // e^{i k theta} by recurrence
    const Complex step(std::cos(theta), std::sin(theta));
    Complex rot = step;
    for (std::size_t k = 1; k < nyq; ++k) {
      v += 2.0 * (coeffs_[k] * rot).real();
      rot *= step;
    }
    v += coeffs_[nyq].real() * std::cos(static_cast<double>(nyq) * theta);
    return v;
  }

 private:
  double period_;
  std::vector<Complex> coeffs_;
};

/// Evaluates the chosen interpolant of f at every point of xs.
inline void interpolate_at(std::span<const double> f, std::span<const double> xs, std::span<double> out,
                           const Grid& g, Interpolation kind) {
  if (kind == Interpolation::CatmullRom) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = catmull_rom(f, xs[i], g);
  } else {
    const TrigInterpolant p(f, g);
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = p(xs[i]);
  }
}

}  // namespace nlb
