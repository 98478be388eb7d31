#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "nlb/error.hpp"

namespace nlb {

using Complex = std::complex<double>;

namespace detail {
// The FFTW planner is not reentrant; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Real-input discrete Fourier transform of length N (even).
///
/// Coefficients follow the interpolation convention
///   u(x_j) = sum_{k=-N/2+1}^{N/2} c_k exp(i 2 pi k x_j / L),
/// so forward() returns c_0 .. c_{N/2} (the N/2+1 nonnegative modes), already
/// scaled by 1/N. Negative modes are the conjugates c_{-k} = conj(c_k).
class SpectralTransform {
 public:
  explicit SpectralTransform(std::size_t n) : n_(n), modes_(n / 2 + 1) {
    if (n < 2 || n % 2 != 0) throw DomainError("SpectralTransform: length must be even");
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(modes_);
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec_, real_, FFTW_ESTIMATE);
  }

  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  ~SpectralTransform() {
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(inverse_);
      fftw_destroy_plan(forward_);
    }
    fftw_free(spec_);
    fftw_free(real_);
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t modes() const noexcept { return modes_; }

  void forward(std::span<const double> u, std::span<Complex> c) {
    if (u.size() != n_ || c.size() != modes_) throw DomainError("SpectralTransform::forward: size mismatch");
    std::copy(u.begin(), u.end(), real_);
    fftw_execute(forward_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k < modes_; ++k) c[k] = Complex(spec_[k][0], spec_[k][1]) * scale;
  }

  /// Inverse of forward(). The imaginary parts of c_0 and c_{N/2} are ignored.
  void inverse(std::span<const Complex> c, std::span<double> u) {
    if (u.size() != n_ || c.size() != modes_) throw DomainError("SpectralTransform::inverse: size mismatch");
    for (std::size_t k = 0; k < modes_; ++k) {
      spec_[k][0] = c[k].real();
      spec_[k][1] = c[k].imag();
    }
    spec_[0][1] = 0.0;
    spec_[modes_ - 1][1] = 0.0;
    fftw_execute(inverse_);
    std::copy(real_, real_ + n_, u.begin());
  }

  std::vector<Complex> forward(std::span<const double> u) {
    std::vector<Complex> c(modes_);
    forward(u, c);
    return c;
  }

  std::vector<double> inverse(std::span<const Complex> c) {
    std::vector<double> u(n_);
    inverse(c, u);
    return u;
  }

 private:
  std::size_t n_;
  std::size_t modes_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

/// Per-thread cached transform of length n.
inline SpectralTransform& spectral_transform(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<SpectralTransform>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<SpectralTransform>(n);
  return *slot;
}

/// Physical wavenumber 2 pi k / L of mode k.
inline double wavenumber(std::size_t k, double period) noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(k) / period;
}

}  // namespace nlb
