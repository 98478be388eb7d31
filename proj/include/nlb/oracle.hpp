#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlb/coupling.hpp"
#include "nlb/error.hpp"
#include "nlb/grid.hpp"

namespace nlb {

/// Probe gradients at t = 0 for the two-point gradient ODE systems.
///
/// Plus case (period 2h):   F1 = u_x(0, t),  F2 = u_x(h, t),   F1' = F2' = -2 F1 F2.
/// Minus case (period 6h):  F1 = u_x(h, t),  F2 = u_x(2h, t),  F1' = -F1 F2, F2' = F1 F2.
struct GradientPair {
  double f1_0 = 0.0;
  double f2_0 = 0.0;
  Sign sign = Sign::Plus;

  /// The conserved quantity: F1 - F2 (plus) or F1 + F2 (minus).
  double invariant() const noexcept { return sign == Sign::Plus ? f1_0 - f2_0 : f1_0 + f2_0; }
};

/// Sampled gradient trajectory F1(t) (and its partner F2(t)).
struct OracleCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> partner;
  std::optional<double> t_star;
  /// Last time before |F1| + |F2| exceeded the overflow bracket (ODE integration only).
  std::optional<double> divergence_time;

  /// Linear interpolation in time; throws outside the sampled range.
  double value_at(double t) const {
    if (times.empty() || t < times.front() || t > times.back())
      throw DomainError("OracleCurve::value_at: t = " + std::to_string(t) + " outside the sampled range");
    auto it = std::lower_bound(times.begin(), times.end(), t);
    const auto i = static_cast<std::size_t>(it - times.begin());
    if (i == 0) return values.front();
    const double t0 = times[i - 1], t1 = times[i];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * values[i - 1] + w * values[i];
  }
};

// ---------------------------------------------------------------------------------------------
// Plus case. With A = F1(0) - F2(0) the system reduces to the logistic equation
//   F1' = 2 A F1 - 2 F1^2,
// whose solution is written below as F1 = 1 / D(t) with
//   D(t) = -expm1(-2 A t) / A + exp(-2 A t) / F1(0),
// which is regular at A = 0 (D -> 2t + 1/F1(0)).

/// Singular time of the plus-case gradient, if the pair blows up forward in time.
inline std::optional<double> plus_blowup_time(double f1_0, double f2_0) {
  if (f1_0 == 0.0) return std::nullopt;
  const double a = f1_0 - f2_0;
  double t = 0.0;
  if (a == 0.0) {
    t = -1.0 / (2.0 * f1_0);
  } else {
    if (f2_0 / f1_0 <= 0.0) return std::nullopt;
    t = std::log1p(-a / f1_0) / (2.0 * a);
  }
  if (!(t > 0.0) || !std::isfinite(t)) return std::nullopt;
  return t;
}

inline double plus_closed_form(const GradientPair& p, double t) {
  if (p.f1_0 == 0.0) return 0.0;
  if (auto ts = plus_blowup_time(p.f1_0, p.f2_0); ts && t >= *ts)
    throw SingularityError("plus_closed_form: t = " + std::to_string(t) + " is at or past t* = " + std::to_string(*ts));
  const double a = p.f1_0 - p.f2_0;
  const double d = (a == 0.0) ? 2.0 * t + 1.0 / p.f1_0
                              : -std::expm1(-2.0 * a * t) / a + std::exp(-2.0 * a * t) / p.f1_0;
  return 1.0 / d;
}

// ---------------------------------------------------------------------------------------------
// Minus case. With A = F1(0) + F2(0):  F1' = F1^2 - A F1, solved as F1 = 1 / D(t),
//   D(t) = -expm1(A t) / A + exp(A t) / F1(0),
// equivalent to A e^{AB} / (e^{AB} - e^{At}) with B = (ln F1(0) - ln(-F2(0))) / A.

inline void require_minus_hypotheses(double f1_0, double f2_0) {
  if (!(f1_0 > 0.0)) throw DomainError("lemma hypothesis violated: F_1(0) > 0 required");
  if (!(f2_0 < 0.0)) throw DomainError("lemma hypothesis violated: F_2(0) < 0 required");
}

/// B, the singular time of the minus-case gradient. The A = 0 limit is 1 / F1(0).
inline double minus_blowup_time(double f1_0, double f2_0) {
  require_minus_hypotheses(f1_0, f2_0);
  const double a = f1_0 + f2_0;
  if (a == 0.0) return 1.0 / f1_0;
  return -std::log1p(-a / f1_0) / a;
}

inline double minus_closed_form(const GradientPair& p, double t) {
  const double b = minus_blowup_time(p.f1_0, p.f2_0);
  if (t >= b) throw SingularityError("minus_closed_form: t = " + std::to_string(t) + " is at or past B = " + std::to_string(b));
  const double a = p.f1_0 + p.f2_0;
  const double d = (a == 0.0) ? 1.0 / p.f1_0 - t : -std::expm1(a * t) / a + std::exp(a * t) / p.f1_0;
  return 1.0 / d;
}

inline std::optional<double> blowup_time(const GradientPair& p) {
  if (p.sign == Sign::Plus) return plus_blowup_time(p.f1_0, p.f2_0);
  return minus_blowup_time(p.f1_0, p.f2_0);
}

inline double closed_form(const GradientPair& p, double t) {
  return p.sign == Sign::Plus ? plus_closed_form(p, t) : minus_closed_form(p, t);
}

/// F2 from F1 through the conserved quantity.
inline double partner_of(const GradientPair& p, double f1) noexcept {
  return p.sign == Sign::Plus ? f1 - p.invariant() : p.invariant() - f1;
}

inline OracleCurve sample_closed_form(const GradientPair& p, std::span<const double> times) {
  OracleCurve c;
  c.t_star = blowup_time(p);
  for (double t : times) {
    if (c.t_star && t >= *c.t_star) break;
    const double f1 = closed_form(p, t);
    c.times.push_back(t);
    c.values.push_back(f1);
    c.partner.push_back(partner_of(p, f1));
  }
  return c;
}

/// Classical RK4 on the pair system. Stops once |F1| + |F2| exceeds `overflow`.
inline OracleCurve ode_integrate_pair(const GradientPair& p, double dt, double t_end, double overflow = 1e8) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw DomainError("ode_integrate_pair: dt and t_end must be positive");
  const double k = p.sign == Sign::Plus ? 2.0 : 1.0;
  // Both components share |F1 F2| up to sign: F1' = -k F1 F2, F2' = s k F1 F2.
  const double s2 = p.sign == Sign::Plus ? -1.0 : 1.0;
  auto rhs = [&](double f1, double f2, double& d1, double& d2) {
    const double prod = k * f1 * f2;
    d1 = -prod;
    d2 = s2 * prod;
  };

  OracleCurve c;
  if (p.sign == Sign::Plus) {
    c.t_star = plus_blowup_time(p.f1_0, p.f2_0);
  } else if (p.f1_0 > 0.0 && p.f2_0 < 0.0) {
    c.t_star = minus_blowup_time(p.f1_0, p.f2_0);
  }

  double f1 = p.f1_0, f2 = p.f2_0, t = 0.0;
  c.times.push_back(t);
  c.values.push_back(f1);
  c.partner.push_back(f2);
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  for (std::size_t n = 0; n < steps; ++n) {
    const double h = std::min(dt, t_end - t);
    double a1, b1, a2, b2, a3, b3, a4, b4;
    rhs(f1, f2, a1, b1);
    rhs(f1 + 0.5 * h * a1, f2 + 0.5 * h * b1, a2, b2);
    rhs(f1 + 0.5 * h * a2, f2 + 0.5 * h * b2, a3, b3);
    rhs(f1 + h * a3, f2 + h * b3, a4, b4);
    const double n1 = f1 + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    const double n2 = f2 + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    if (!std::isfinite(n1) || !std::isfinite(n2) || std::abs(n1) + std::abs(n2) > overflow) {
      c.divergence_time = t;
      break;
    }
    f1 = n1;
    f2 = n2;
    t = (n + 1 == steps) ? t_end : static_cast<double>(n + 1) * dt;
    c.times.push_back(t);
    c.values.push_back(f1);
    c.partner.push_back(f2);
  }
  return c;
}

// ---------------------------------------------------------------------------------------------
// Classical Burgers u_t + c u u_x = 0 by characteristics: u(x, t) = u0(xi), x = xi + c u0(xi) t.

struct CharacteristicsSolution {
  Field field;
  double t_shock;  ///< +inf when u0 is nowhere decreasing
  double max_residual;
};

/// Shock time -1 / (c min u0') of the smooth profile with slope `du0`.
template <class DF>
double burgers_shock_time(DF&& du0, const Grid& grid, double speed = 2.0) {
  const std::size_t samples = 64 * grid.size();
  const double L = grid.period();
  double best_x = 0.0, best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = L * static_cast<double>(i) / static_cast<double>(samples);
    const double v = du0(x);
    if (v < best) best = v, best_x = x;
  }
  // golden-section refinement of the minimum slope within one sample spacing
  const double step = L / static_cast<double>(samples);
  double lo = best_x - step, hi = best_x + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (du0(m1) < du0(m2)) hi = m2; else lo = m1;
  }
  best = std::min(best, du0(0.5 * (lo + hi)));
  if (!(best < 0.0)) return std::numeric_limits<double>::infinity();
  return -1.0 / (speed * best);
}

template <class F, class DF>
CharacteristicsSolution burgers_characteristics(F&& u0, DF&& du0, const Grid& grid, double t, double speed = 2.0) {
  if (!(t >= 0.0)) throw DomainError("burgers_characteristics: t must be nonnegative");
  const double t_shock = burgers_shock_time(du0, grid, speed);
  if (t >= t_shock)
    throw DomainError("burgers_characteristics: pre-shock only; t = " + std::to_string(t) +
                      " >= t_shock = " + std::to_string(t_shock));

  double amp = 0.0;
  for (std::size_t j = 0; j < 8 * grid.size(); ++j)
    amp = std::max(amp, std::abs(u0(grid.period() * static_cast<double>(j) / (8.0 * grid.size()))));
  const double reach = speed * t * amp * 1.01 + 1e-12;

  std::vector<double> out(grid.size());
  double max_res = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.node(j);
    auto G = [&](double xi) { return xi + speed * t * u0(xi) - x; };
    double lo = x - reach, hi = x + reach;
    double xi = x - speed * t * u0(x);
    xi = std::clamp(xi, lo, hi);
    double g = G(xi);
    for (int it = 0; it < 200 && std::abs(g) > 1e-15 * std::max(1.0, std::abs(x)); ++it) {
      if (g > 0.0) hi = xi; else lo = xi;
      const double slope = 1.0 + speed * t * du0(xi);
      double next = xi - g / slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == xi) break;
      xi = next;
      g = G(xi);
    }
    max_res = std::max(max_res, std::abs(g));
    out[j] = u0(xi);
  }
  return {Field(grid, std::move(out), t), t_shock, max_res};
}

}  // namespace nlb
