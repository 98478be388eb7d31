#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <system_error>
#include <type_traits>
#include <variant>
#include <vector>

#include "nlb/calculus.hpp"
#include "nlb/coupling.hpp"
#include "nlb/error.hpp"
#include "nlb/grid.hpp"
#include "nlb/oracle.hpp"

namespace nlb {

namespace ic {

/// x(x-h)(x-2h)(-1/(2h^2) + 3x/h^3 - 3x^2/(2h^4)) on [0, 2h], extended with period 2h.
struct PlusBlowupPoly {
  double h = 1.0;
};

/// 16 (x-4)^2 (x+4)^2 x^2 (3x-8)(3x+8)(3x+4)(3x-4) / (3375 (112 + 153 x^2)) on [-4, 4], period 8.
/// Pinned to h = 4/3.
struct MinusBlowupRational {
  static constexpr double h = 4.0 / 3.0;
  static constexpr double period = 8.0;
};

/// sin(pi k x / h): L u = 0 for the minus sign.
struct StationaryMinusSine {
  int k = 1;
  double h = 1.0;
};

/// sin(pi (k - 1/2) x / h): L u = 0 for the plus sign.
struct StationaryPlusSine {
  int k = 1;
  double h = 1.0;
};

/// sin(2 pi x / L).
struct PlainSine {
  double period = 2.0;
};

/// Nodal values read from a file; one value per line.
struct Tabulated {
  std::string path;
  std::vector<double> values;
};

}  // namespace ic

/// Named initial data u0(x).
class InitialCondition {
 public:
  using Kind = std::variant<ic::PlusBlowupPoly, ic::MinusBlowupRational, ic::StationaryMinusSine,
                            ic::StationaryPlusSine, ic::PlainSine, ic::Tabulated>;

  explicit InitialCondition(Kind kind) : kind_(std::move(kind)) { validate(); }

  static InitialCondition plus_blowup_poly(double h) { return InitialCondition(ic::PlusBlowupPoly{h}); }
  static InitialCondition minus_blowup_rational() { return InitialCondition(ic::MinusBlowupRational{}); }
  static InitialCondition stationary_minus_sine(int k, double h) {
    return InitialCondition(ic::StationaryMinusSine{k, h});
  }
  static InitialCondition stationary_plus_sine(int k, double h) {
    return InitialCondition(ic::StationaryPlusSine{k, h});
  }
  static InitialCondition plain_sine(double period) { return InitialCondition(ic::PlainSine{period}); }
  static InitialCondition tabulated(const std::filesystem::path& path);

  const Kind& kind() const noexcept { return kind_; }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ic::PlusBlowupPoly>) return "plus-blowup-poly";
          else if constexpr (std::is_same_v<T, ic::MinusBlowupRational>) return "minus-blowup-rational";
          else if constexpr (std::is_same_v<T, ic::StationaryMinusSine>) return "stationary-minus-sine";
          else if constexpr (std::is_same_v<T, ic::StationaryPlusSine>) return "stationary-plus-sine";
          else if constexpr (std::is_same_v<T, ic::PlainSine>) return "plain-sine";
          else return "tabulated";
        },
        kind_);
  }

  bool has_closed_form() const noexcept { return !std::holds_alternative<ic::Tabulated>(kind_); }

  /// Smallest period of the closed form; nullopt for tabulated data.
  std::optional<double> natural_period() const {
    return std::visit(
        [](const auto& k) -> std::optional<double> {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ic::PlusBlowupPoly>) return 2.0 * k.h;
          else if constexpr (std::is_same_v<T, ic::MinusBlowupRational>) return T::period;
          else if constexpr (std::is_same_v<T, ic::StationaryMinusSine>) return 2.0 * k.h / std::abs(k.k);
          else if constexpr (std::is_same_v<T, ic::StationaryPlusSine>) return 4.0 * k.h / std::abs(2 * k.k - 1);
          else if constexpr (std::is_same_v<T, ic::PlainSine>) return k.period;
          else return std::nullopt;
        },
        kind_);
  }

  /// Whether a grid of period L can carry this IC: equal period for the blow-up
  /// polynomials, an integer multiple for the sine families.
  bool period_compatible(double L) const {
    const auto p = natural_period();
    if (!p) return true;
    const double r = L / *p;
    const bool exact_only = std::holds_alternative<ic::PlusBlowupPoly>(kind_) ||
                            std::holds_alternative<ic::MinusBlowupRational>(kind_);
    if (exact_only) return std::abs(r - 1.0) <= 1e-12;
    return std::round(r) >= 1.0 && std::abs(r - std::round(r)) <= 1e-9;
  }

  /// Closed-form u0(x) for any real x (periodic extension).
  double value(double x) const {
    return std::visit([x](const auto& k) { return eval(k, x); }, kind_);
  }

  /// Closed-form u0'(x), derived by hand for each catalog entry.
  double slope(double x) const {
    return std::visit([x](const auto& k) { return eval_slope(k, x); }, kind_);
  }

 private:
  static double wrap(double x, double lo, double period) {
    double r = std::fmod(x - lo, period);
    if (r < 0.0) r += period;
    return lo + r;
  }

  static double eval(const ic::PlusBlowupPoly& k, double x) {
    const double h = k.h;
    x = wrap(x, 0.0, 2.0 * h);
    const double q = -1.0 / (2.0 * h * h) + 3.0 * x / (h * h * h) - 1.5 * x * x / (h * h * h * h);
    return x * (x - h) * (x - 2.0 * h) * q;
  }
  static double eval_slope(const ic::PlusBlowupPoly& k, double x) {
    const double h = k.h;
    x = wrap(x, 0.0, 2.0 * h);
    const double p = x * (x - h) * (x - 2.0 * h);
    const double dp = 3.0 * x * x - 6.0 * h * x + 2.0 * h * h;
    const double q = -1.0 / (2.0 * h * h) + 3.0 * x / (h * h * h) - 1.5 * x * x / (h * h * h * h);
    const double dq = 3.0 / (h * h * h) - 3.0 * x / (h * h * h * h);
    return dp * q + p * dq;
  }

  // In s = x^2 the rational IC is 16 P(s) / (3375 Q(s)) with
  //   P(s) = s (s - 16)^2 (9s - 64)(9s - 16),  Q(s) = 112 + 153 s.
  static double eval(const ic::MinusBlowupRational&, double x) {
    x = wrap(x, -4.0, 8.0);
    const double num = 16.0 * (x - 4.0) * (x - 4.0) * (x + 4.0) * (x + 4.0) * x * x * (3.0 * x - 8.0) *
                       (3.0 * x + 8.0) * (3.0 * x + 4.0) * (3.0 * x - 4.0);
    return num / (3375.0 * (112.0 + 153.0 * x * x));
  }
  static double eval_slope(const ic::MinusBlowupRational&, double x) {
    x = wrap(x, -4.0, 8.0);
    const double s = x * x;
    const double a = s, b = (s - 16.0) * (s - 16.0), c = 9.0 * s - 64.0, d = 9.0 * s - 16.0;
    const double P = a * b * c * d;
    const double dP = b * c * d + a * 2.0 * (s - 16.0) * c * d + a * b * 9.0 * d + a * b * c * 9.0;
    const double Q = 112.0 + 153.0 * s;
    const double dQ = 153.0;
    const double dfds = 16.0 / 3375.0 * (dP * Q - P * dQ) / (Q * Q);
    return 2.0 * x * dfds;
  }

  static double eval(const ic::StationaryMinusSine& k, double x) { return std::sin(std::numbers::pi * k.k * x / k.h); }
  static double eval_slope(const ic::StationaryMinusSine& k, double x) {
    const double w = std::numbers::pi * k.k / k.h;
    return w * std::cos(w * x);
  }

  static double eval(const ic::StationaryPlusSine& k, double x) {
    return std::sin(std::numbers::pi * (k.k - 0.5) * x / k.h);
  }
  static double eval_slope(const ic::StationaryPlusSine& k, double x) {
    const double w = std::numbers::pi * (k.k - 0.5) / k.h;
    return w * std::cos(w * x);
  }

  static double eval(const ic::PlainSine& k, double x) { return std::sin(2.0 * std::numbers::pi * x / k.period); }
  static double eval_slope(const ic::PlainSine& k, double x) {
    const double w = 2.0 * std::numbers::pi / k.period;
    return w * std::cos(w * x);
  }

  static double eval(const ic::Tabulated& t, double) {
    throw DomainError("tabulated initial data '" + t.path + "' has no closed form; sample it on a grid");
  }
  static double eval_slope(const ic::Tabulated& t, double x) { return eval(t, x); }

  void validate() const {
    std::visit(
        [](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, ic::PlusBlowupPoly>) {
            if (!(k.h > 0.0)) throw DomainError("plus-blowup-poly: h must be positive");
          } else if constexpr (std::is_same_v<T, ic::StationaryMinusSine> ||
                               std::is_same_v<T, ic::StationaryPlusSine>) {
            if (!(k.h > 0.0)) throw DomainError("stationary sine: h must be positive");
            if constexpr (std::is_same_v<T, ic::StationaryMinusSine>)
              if (k.k == 0) throw DomainError("stationary-minus-sine: k must be nonzero");
          } else if constexpr (std::is_same_v<T, ic::PlainSine>) {
            if (!(k.period > 0.0)) throw DomainError("plain-sine: period must be positive");
          }
        },
        kind_);
  }

  Kind kind_;
};

/// Reads one decimal value per line (LF endings, no header). A trailing newline is allowed.
inline std::vector<double> read_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open tabulated initial data '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  bool blank_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      blank_seen = true;
      continue;
    }
    if (blank_seen) throw FormatError(path.string() + ": blank line before line " + std::to_string(lineno));
    double v = 0.0;
    const char* first = line.data();
    const char* last = line.data() + line.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": not a finite decimal value: '" + line + "'");
    values.push_back(v);
  }
  if (values.empty()) throw FormatError(path.string() + ": no values");
  return values;
}

inline InitialCondition InitialCondition::tabulated(const std::filesystem::path& path) {
  return InitialCondition(ic::Tabulated{path.string(), read_tabulated(path)});
}

/// Samples the initial condition at the grid nodes (t = 0).
inline Field evaluate_ic(const InitialCondition& u0, const Grid& grid) {
  if (const auto* tab = std::get_if<ic::Tabulated>(&u0.kind())) {
    if (tab->values.size() != grid.size())
      throw FormatError("tabulated initial data '" + tab->path + "' has " + std::to_string(tab->values.size()) +
                        " values but the grid has " + std::to_string(grid.size()) + " points");
    return Field(grid, tab->values, 0.0);
  }
  if (!u0.period_compatible(grid.period()))
    throw DomainError(u0.name() + ": grid period " + std::to_string(grid.period()) +
                      " does not match the natural period " + std::to_string(*u0.natural_period()));
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = u0.value(grid.node(j));
  return Field(grid, std::move(v), 0.0);
}

// ---------------------------------------------------------------------------------------------
// Hypothesis checks for the two blow-up lemmas.

enum class Parity { Neither, Even, Odd };

inline const char* to_string(Parity p) noexcept {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    default: return "neither";
  }
}

/// sup_j |u(x_j) - s u(-x_j)| with s = +1 (even) or -1 (odd).
inline double parity_defect(std::span<const double> u, Parity p) {
  const std::size_t n = u.size();
  const double s = p == Parity::Odd ? -1.0 : 1.0;
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(u[j] - s * u[(n - j) % n]));
  return m;
}

inline Parity classify_parity(std::span<const double> u, double tol = 1e-9) {
  double scale = 1.0;
  for (double v : u) scale = std::max(scale, std::abs(v));
  if (parity_defect(u, Parity::Even) <= tol * scale) return Parity::Even;
  if (parity_defect(u, Parity::Odd) <= tol * scale) return Parity::Odd;
  return Parity::Neither;
}

struct HypothesisCheck {
  std::string name;
  double value = 0.0;
  bool passed = false;
};

struct AssumptionReport {
  Sign sign = Sign::Plus;
  std::string lemma;
  std::vector<HypothesisCheck> checks;
  Parity parity = Parity::Neither;
  /// sup |L u0| on the grid; zero (to tolerance) means u0 is a stationary solution.
  double stationary_residual = 0.0;
  bool stationary = false;
  std::optional<double> f1_0;
  std::optional<double> f2_0;
  /// Predicted singular time from the gradient ODE when the hypotheses hold.
  std::optional<double> t_star;
  bool passed = false;

  const HypothesisCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

/// u0 and u0' at x, from the closed form or, for tabulated data, from the grid.
struct PointSampler {
  const InitialCondition& u0;
  const Field& samples;
  const Field& slopes;

  double value(double x) const {
    if (u0.has_closed_form()) return u0.value(x);
    const auto j = samples.grid().aligned_index(x, 1e-9);
    return j < 0 ? std::nan("") : samples[static_cast<std::size_t>(j)];
  }
  double slope(double x) const {
    if (u0.has_closed_form()) return u0.slope(x);
    const auto j = samples.grid().aligned_index(x, 1e-9);
    return j < 0 ? std::nan("") : slopes[static_cast<std::size_t>(j)];
  }
};

}  // namespace detail

/// Evaluates the plus-sign or minus-sign blow-up lemma hypotheses (chosen by the coupling sign).
/// Never throws on a failed hypothesis; every check is reported with its numeric value.
inline AssumptionReport validate_assumptions(const InitialCondition& u0, const NonlocalCoupling& coupling,
                                             const Grid& grid, double zero_tol = 1e-9) {
  const Field samples = evaluate_ic(u0, grid);
  const Field slopes = derivative(samples, DerivativeMethod::Spectral);
  const detail::PointSampler at{u0, samples, slopes};

  AssumptionReport r;
  r.sign = coupling.sign();
  r.parity = classify_parity(samples.values());
  r.stationary_residual = shift_combine(samples, coupling).max_abs();
  r.stationary = r.stationary_residual <= zero_tol * std::max(1.0, samples.max_abs());

  const double h = coupling.shift();
  const double L = grid.period();
  auto add = [&r](std::string name, double value, bool ok) { r.checks.push_back({std::move(name), value, ok}); };

  if (coupling.sign() == Sign::Plus) {
    r.lemma = "plus-sign blow-up (period 2h, u0(0) = u0(h) = 0, u0'(0) < 0, u0'(h) < 0)";
    add("period L = 2h", h > 0.0 ? L / h : std::nan(""), h > 0.0 && std::abs(L - 2.0 * h) <= 1e-12 * L);
    const double z0 = at.value(0.0), zh = at.value(h);
    add("u0(0) = 0", std::abs(z0), std::abs(z0) < zero_tol);
    add("u0(h) = 0", std::abs(zh), std::abs(zh) < zero_tol);
    const double f1 = at.slope(0.0), f2 = at.slope(h);
    r.f1_0 = f1;
    r.f2_0 = f2;
    add("u_x(0,0) < 0", f1, f1 < 0.0);
    add("u_x(h,0) < 0", f2, f2 < 0.0);
    if (std::isfinite(f1) && std::isfinite(f2)) r.t_star = plus_blowup_time(f1, f2);
  } else {
    r.lemma = "minus-sign blow-up (period 6h, even, u0(kh) = 0, u0'(3kh) = 0, B > 0, u_x(2h,0) < 0)";
    add("period L = 6h", h > 0.0 ? L / h : std::nan(""), h > 0.0 && std::abs(L - 6.0 * h) <= 1e-12 * L);
    const double even_defect = parity_defect(samples.values(), Parity::Even);
    add("u0 even", even_defect, even_defect <= zero_tol * std::max(1.0, samples.max_abs()));
    double zmax = 0.0;
    for (int k = 0; k < 6; ++k) zmax = std::max(zmax, std::abs(at.value(k * h)));
    add("u0(kh) = 0", zmax, zmax < zero_tol);
    const double s0 = std::abs(at.slope(0.0)), s3 = std::abs(at.slope(3.0 * h));
    add("u0'(3kh) = 0", std::max(s0, s3), std::max(s0, s3) < zero_tol);
    const double f1 = at.slope(h), f2 = at.slope(2.0 * h);
    r.f1_0 = f1;
    r.f2_0 = f2;
    add("u_x(h,0) > 0 (B defined)", f1, f1 > 0.0);
    add("u_x(2h,0) < 0", f2, f2 < 0.0);
    double b = std::nan("");
    if (f1 > 0.0 && f2 < 0.0) b = minus_blowup_time(f1, f2);
    add("B > 0", b, b > 0.0);
    if (b > 0.0) r.t_star = b;
  }
  r.passed = std::all_of(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.passed; });
  return r;
}

}  // namespace nlb
