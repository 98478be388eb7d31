#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nlb/error.hpp"
#include "nlb/grid.hpp"
#include "nlb/spectral.hpp"

namespace nlb {

enum class DerivativeMethod {
  Centered2,  ///< (u_{j+1} - u_{j-1}) / (2 dx), periodic wraparound
  Spectral,   ///< exact derivative of the trigonometric interpolant, Nyquist mode zeroed
};

namespace detail {

inline void centered_derivative(std::span<const double> u, std::span<double> out, double dx) {
  const std::size_t n = u.size();
  const double inv = 0.5 / dx;
  for (std::size_t j = 0; j < n; ++j) out[j] = (u[(j + 1) % n] - u[(j + n - 1) % n]) * inv;
}

/// Applies i k to coefficients already in `coeffs` (modes 0..N/2) and inverts.
inline void spectral_derivative_from_coeffs(std::vector<Complex>& coeffs, std::span<double> out, double period,
                                            SpectralTransform& fft) {
  const std::size_t nyq = coeffs.size() - 1;
  for (std::size_t k = 0; k < nyq; ++k) coeffs[k] *= Complex(0.0, wavenumber(k, period));
  coeffs[nyq] = 0.0;
  fft.inverse(coeffs, out);
}

inline void spectral_derivative(std::span<const double> u, std::span<double> out, double period,
                                SpectralTransform& fft, std::vector<Complex>& coeffs) {
  coeffs.resize(fft.modes());
  fft.forward(u, coeffs);
  spectral_derivative_from_coeffs(coeffs, out, period, fft);
}

inline void derivative_into(std::span<const double> u, std::span<double> out, const Grid& g, DerivativeMethod m,
                            std::vector<Complex>& scratch) {
  if (m == DerivativeMethod::Centered2) {
    centered_derivative(u, out, g.spacing());
  } else {
    spectral_derivative(u, out, g.period(), spectral_transform(g.size()), scratch);
  }
}

}  // namespace detail

inline Field derivative(const Field& field, DerivativeMethod method = DerivativeMethod::Spectral) {
  require_finite(field, "derivative");
  std::vector<double> out(field.size());
  std::vector<Complex> scratch;
  detail::derivative_into(field.values(), out, field.grid(), method, scratch);
  return field.with_values(std::move(out));
}

enum class SobolevKind {
  Homogeneous,  ///< ||d^m u / dx^m||_{L2}
  Full,         ///< sqrt(sum_{j=0..m} ||d^j u / dx^j||^2)
};

/// Largest derivative order the norm accepts on an N-point grid.
inline std::size_t max_sobolev_order(std::size_t n_points) noexcept { return n_points / 4; }

namespace detail {

/// sum over all modes (both signs) of |k|^{2m} |c_k|^2, Nyquist kept only for even m.
inline double weighted_mode_energy(std::span<const Complex> c, double period, std::size_t m) {
  const std::size_t nyq = c.size() - 1;
  double sum = 0.0;
  for (std::size_t k = 0; k <= nyq; ++k) {
    if (m == 0 && k == 0) {
      sum += std::norm(c[0]);
      continue;
    }
    if (k == 0) continue;
    if (k == nyq && m % 2 == 1) continue;
    const double w = std::pow(wavenumber(k, period), 2.0 * static_cast<double>(m));
    sum += (k == nyq ? 1.0 : 2.0) * w * std::norm(c[k]);
  }
  return sum;
}

}  // namespace detail

/// (integral_0^L |d^m u/dx^m|^2 dx)^{1/2}, evaluated from the Fourier coefficients.
inline double sobolev_norm(const Field& field, std::size_t m, SobolevKind kind = SobolevKind::Homogeneous) {
  require_finite(field, "sobolev_norm");
  const std::size_t n = field.size();
  if (m > max_sobolev_order(n))
    throw DomainError("sobolev_norm: order m = " + std::to_string(m) + " exceeds the resolvable limit N/4 = " +
                      std::to_string(max_sobolev_order(n)));
  auto& fft = spectral_transform(n);
  const auto c = fft.forward(field.values());
  const double period = field.grid().period();
  double energy = 0.0;
  if (kind == SobolevKind::Homogeneous) {
    energy = detail::weighted_mode_energy(c, period, m);
  } else {
    for (std::size_t j = 0; j <= m; ++j) energy += detail::weighted_mode_energy(c, period, j);
  }
  return std::sqrt(period * energy);
}

}  // namespace nlb
