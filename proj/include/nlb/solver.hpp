#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nlb/calculus.hpp"
#include "nlb/coupling.hpp"
#include "nlb/diagnostics.hpp"
#include "nlb/error.hpp"
#include "nlb/grid.hpp"
#include "nlb/initial_condition.hpp"
#include "nlb/spectral.hpp"

namespace nlb {

enum class Scheme {
  FTCS,         ///< forward Euler in time, centered differences in space
  RK4Centered,  ///< classical RK4, centered differences
  RK4Spectral,  ///< classical RK4, spectral derivative
};

inline const char* to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::FTCS: return "ftcs";
    case Scheme::RK4Centered: return "rk4-centered";
    default: return "rk4-spectral";
  }
}

inline DerivativeMethod derivative_method(Scheme s) noexcept {
  return s == Scheme::RK4Spectral ? DerivativeMethod::Spectral : DerivativeMethod::Centered2;
}

struct SolverConfig {
  Scheme scheme = Scheme::RK4Spectral;
  double dt = 1e-4;
  double t_end = 1.0;
  double cfl_limit = 0.5;
  /// Blow-up once max|u_x| exceeds this multiple of its initial value.
  double blowup_gradient_factor = 1e3;
  /// Blow-up once the relative L2 amplitude of the top third of Fourier modes exceeds
  /// this value (the field is no longer resolved). Zero disables the check.
  double resolution_tolerance = 1e-4;
  std::size_t record_every = 10;
  std::vector<double> probes;
  /// 2/3-rule filter on the right-hand side (RK4Spectral only).
  bool dealias = false;
  ShiftMethod shift_method = ShiftMethod::Auto;
  /// Keep a full field snapshot every this many steps (0 = never).
  std::size_t snapshot_every = 0;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be positive");
    if (!(dt < t_end)) throw DomainError("dt must be smaller than t_end");
    if (!(cfl_limit > 0.0)) throw DomainError("cfl_limit must be positive");
    if (!(blowup_gradient_factor > 0.0)) throw DomainError("blowup_gradient_factor must be positive");
    if (!(resolution_tolerance >= 0.0)) throw DomainError("resolution_tolerance must be nonnegative");
    if (record_every == 0) throw DomainError("record_every must be positive");
  }
};

enum class DetectionReason { None, GradientThreshold, ResolutionLoss, CflFailure, NumericalOverflow };

inline const char* to_string(DetectionReason r) noexcept {
  switch (r) {
    case DetectionReason::GradientThreshold: return "gradient threshold";
    case DetectionReason::ResolutionLoss: return "resolution loss";
    case DetectionReason::CflFailure: return "cfl failure";
    case DetectionReason::NumericalOverflow: return "numerical overflow";
    default: return "none";
  }
}

struct BlowupVerdict {
  bool blew_up = false;
  std::optional<double> t_detect;
  /// Zero of the line fitted to the last five recorded values of 1 / max|u_x|.
  std::optional<double> t_estimate;
  /// argmax |u_x| at detection, in [0, L).
  std::optional<double> location;
  DetectionReason reason = DetectionReason::None;
};

struct SimulationResult {
  RunRecord record;
  BlowupVerdict verdict;
  Field final_field;
  std::vector<Field> snapshots;
  std::size_t steps = 0;
  /// Step size in force at the end (halved once after a CFL refusal).
  double final_dt = 0.0;
};

/// Time integrator for u_t = -(L u) u_x on one grid; owns its scratch buffers.
class NonlocalStepper {
 public:
  NonlocalStepper(NonlocalCoupling coupling, Scheme scheme, ShiftMethod shift = ShiftMethod::Auto,
                  bool dealias = false)
      : coupling_(std::move(coupling)),
        scheme_(scheme),
        shift_(coupling_.resolve(shift)),
        dealias_(dealias && scheme == Scheme::RK4Spectral),
        n_(coupling_.grid().size()),
        fft_(&spectral_transform(n_)) {
    for (auto* v : {&lu_, &ux_, &k1_, &k2_, &k3_, &k4_, &stage_}) v->resize(n_);
  }

  const NonlocalCoupling& coupling() const noexcept { return coupling_; }
  Scheme scheme() const noexcept { return scheme_; }

  /// out = -(L u) u_x; leaves L u in lu_.
  void rhs(std::span<const double> u, std::span<double> out) {
    detail::shift_combine_into(u, lu_, coupling_, shift_, coeffs_);
    if (derivative_method(scheme_) == DerivativeMethod::Spectral) {
      detail::spectral_derivative(u, ux_, coupling_.grid().period(), *fft_, coeffs_);
    } else {
      detail::centered_derivative(u, ux_, coupling_.grid().spacing());
    }
    for (std::size_t j = 0; j < n_; ++j) out[j] = -lu_[j] * ux_[j];
    if (dealias_) filter_two_thirds(out);
  }

  /// dt max|L u| / dx for the state u.
  double cfl_number(std::span<const double> u, double dt) {
    detail::shift_combine_into(u, lu_, coupling_, shift_, coeffs_);
    double m = 0.0;
    for (double v : lu_) m = std::max(m, std::abs(v));
    return dt * m / coupling_.grid().spacing();
  }

  /// Advances u in place by dt (no CFL check).
  void advance(std::vector<double>& u, double dt) {
    if (scheme_ == Scheme::FTCS) {
      rhs(u, k1_);
      for (std::size_t j = 0; j < n_; ++j) u[j] += dt * k1_[j];
      return;
    }
    rhs(u, k1_);
    for (std::size_t j = 0; j < n_; ++j) stage_[j] = u[j] + 0.5 * dt * k1_[j];
    rhs(stage_, k2_);
    for (std::size_t j = 0; j < n_; ++j) stage_[j] = u[j] + 0.5 * dt * k2_[j];
    rhs(stage_, k3_);
    for (std::size_t j = 0; j < n_; ++j) stage_[j] = u[j] + dt * k3_[j];
    rhs(stage_, k4_);
    for (std::size_t j = 0; j < n_; ++j) u[j] += dt / 6.0 * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
  }

 private:
  void filter_two_thirds(std::span<double> v) {
    coeffs_.resize(fft_->modes());
    fft_->forward(v, coeffs_);
    const std::size_t nyq = coeffs_.size() - 1;
    for (std::size_t k = 0; k <= nyq; ++k)
      if (3 * k > 2 * nyq) coeffs_[k] = 0.0;
    fft_->inverse(coeffs_, v);
  }

  NonlocalCoupling coupling_;
  Scheme scheme_;
  ShiftMethod shift_;
  bool dealias_;
  std::size_t n_;
  SpectralTransform* fft_;
  std::vector<Complex> coeffs_;
  std::vector<double> lu_, ux_, k1_, k2_, k3_, k4_, stage_;
};

/// Right-hand side -(L u) u_x of the nonlocal equation.
inline Field rhs(const Field& field, const NonlocalCoupling& coupling,
                 DerivativeMethod method = DerivativeMethod::Spectral, ShiftMethod shift = ShiftMethod::Auto) {
  require_finite(field, "rhs");
  if (!(field.grid() == coupling.grid())) throw DomainError("rhs: field and coupling grids differ");
  NonlocalStepper stepper(coupling, method == DerivativeMethod::Spectral ? Scheme::RK4Spectral : Scheme::RK4Centered,
                          shift);
  std::vector<double> out(field.size());
  stepper.rhs(field.values(), out);
  return field.with_values(std::move(out));
}

/// One time step of size config.dt. Throws CflError when dt max|L u| / dx > cfl_limit.
inline Field step(const Field& field, const NonlocalCoupling& coupling, const SolverConfig& config) {
  require_finite(field, "step");
  if (!(field.grid() == coupling.grid())) throw DomainError("step: field and coupling grids differ");
  NonlocalStepper stepper(coupling, config.scheme, config.shift_method, config.dealias);
  const double cfl = stepper.cfl_number(field.values(), config.dt);
  if (cfl > config.cfl_limit) {
    std::ostringstream msg;
    msg << "CFL check failed at t = " << field.time() << ": dt max|Lu| / dx = " << cfl << " > " << config.cfl_limit;
    throw CflError(msg.str(), cfl);
  }
  std::vector<double> u(field.data());
  stepper.advance(u, config.dt);
  return Field(field.grid(), std::move(u), field.time() + config.dt);
}

namespace detail {

/// Least-squares line through (t, 1/g) over the last `count` rows, extrapolated to zero.
inline std::optional<double> inverse_gradient_extrapolation(std::span<const double> times,
                                                            std::span<const double> grads, std::size_t count = 5) {
  std::vector<double> tt, yy;
  for (std::size_t i = times.size(); i > 0 && tt.size() < count; --i) {
    const double g = grads[i - 1];
    if (!(g > 0.0) || !std::isfinite(g)) continue;
    tt.push_back(times[i - 1]);
    yy.push_back(1.0 / g);
  }
  if (tt.size() < 2) return std::nullopt;
  const double n = static_cast<double>(tt.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < tt.size(); ++i) {
    st += tt[i];
    sy += yy[i];
    stt += tt[i] * tt[i];
    sty += tt[i] * yy[i];
  }
  const double den = n * stt - st * st;
  if (den == 0.0) return std::nullopt;
  const double slope = (n * sty - st * sy) / den;
  const double icept = (sy - slope * st) / n;
  if (!(slope < 0.0)) return std::nullopt;
  return -icept / slope;
}

}  // namespace detail

/// Integrates from `initial` to config.t_end or until blow-up is detected.
inline SimulationResult simulate(const Field& initial, const NonlocalCoupling& coupling, const SolverConfig& config) {
  config.validate();
  require_finite(initial, "simulate");
  if (!(initial.grid() == coupling.grid())) throw DomainError("simulate: initial field and coupling grids differ");

  const Grid& grid = initial.grid();
  NonlocalStepper stepper(coupling, config.scheme, config.shift_method, config.dealias);
  auto& fft = spectral_transform(grid.size());

  SimulationResult res{.record = {}, .verdict = {}, .final_field = initial, .snapshots = {}, .steps = 0,
                       .final_dt = config.dt};
  res.record.spec = make_record_spec(initial, coupling, config.probes);

  std::vector<double> u(initial.data());
  std::vector<Complex> coeffs(fft.modes());
  std::vector<double> ux(grid.size());
  RecordRow row;

  auto observe = [&](double t) {
    row.t = t;
    fft.forward(u, coeffs);
    detail::fill_row(row, u, coeffs, ux, grid, res.record.spec, fft);
  };

  const double t0 = initial.time();
  observe(t0);
  res.record.append(row);
  if (config.snapshot_every > 0) res.snapshots.push_back(initial);
  const double g0 = row.max_abs_ux;
  const double gradient_limit = g0 > 0.0 ? config.blowup_gradient_factor * g0 : std::numeric_limits<double>::infinity();

  double dt = config.dt;
  bool halved = false;
  double t_base = t0;
  std::size_t n_since_base = 0;
  double t = t0;
  const double t_final = t0 + config.t_end;
  const double t_eps = 1e-12 * std::max(1.0, config.t_end);
  bool last_recorded = true;

  auto declare = [&](DetectionReason reason) {
    res.verdict.blew_up = true;
    res.verdict.reason = reason;
    res.verdict.t_detect = t;
  };

  while (t < t_final - t_eps) {
    const double h = std::min(dt, t_final - t);
    if (stepper.cfl_number(u, h) > config.cfl_limit) {
      if (!halved) {
        halved = true;
        dt *= 0.5;
        t_base = t;
        n_since_base = 0;
        continue;
      }
      declare(DetectionReason::CflFailure);
      break;
    }
    stepper.advance(u, h);
    ++res.steps;
    ++n_since_base;
    t = (h < dt) ? t_final : t_base + static_cast<double>(n_since_base) * dt;

    if (!std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); })) {
      declare(DetectionReason::NumericalOverflow);
      break;
    }
    observe(t);
    last_recorded = false;
    if (res.steps % config.record_every == 0) {
      res.record.append(row);
      last_recorded = true;
    }
    if (config.snapshot_every > 0 && res.steps % config.snapshot_every == 0)
      res.snapshots.push_back(Field(grid, u, t));

    if (row.max_abs_ux > gradient_limit) {
      declare(DetectionReason::GradientThreshold);
      break;
    }
    if (config.resolution_tolerance > 0.0 && row.spectral_tail > config.resolution_tolerance) {
      declare(DetectionReason::ResolutionLoss);
      break;
    }
  }
  if (!last_recorded && res.verdict.reason != DetectionReason::NumericalOverflow) res.record.append(row);

  res.final_dt = dt;
  // After an overflow the record ends at the last finite state; the field is returned as is.
  res.final_field = Field(grid, u, t);
  if (res.verdict.blew_up) {
    res.verdict.location = res.record.argmax_ux_location.back();
    res.verdict.t_estimate = detail::inverse_gradient_extrapolation(res.record.times, res.record.max_abs_ux);
  }
  return res;
}

inline SimulationResult simulate(const InitialCondition& u0, const NonlocalCoupling& coupling, const Grid& grid,
                                 const SolverConfig& config) {
  return simulate(evaluate_ic(u0, grid), coupling, config);
}

}  // namespace nlb
