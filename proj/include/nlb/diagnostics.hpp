#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlb/calculus.hpp"
#include "nlb/coupling.hpp"
#include "nlb/grid.hpp"
#include "nlb/initial_condition.hpp"
#include "nlb/oracle.hpp"
#include "nlb/spectral.hpp"

namespace nlb {

/// Highest Sobolev order monitored per row.
inline constexpr std::size_t monitored_sobolev_orders = 3;

/// What a run observes besides the global maxima.
struct RecordSpec {
  std::vector<double> probes;
  std::vector<std::size_t> probe_nodes;
  /// Parity channel: Even for minus sign + even data, Odd for plus sign + odd data.
  Parity parity = Parity::Neither;
  /// Nodes on the h-lattice where the initial data vanishes.
  std::vector<std::size_t> zero_nodes;
};

/// Resolves probe positions to nodes and picks the parity and lattice channels that
/// the symmetry and zero-preservation properties make applicable for this data.
inline RecordSpec make_record_spec(const Field& initial, const NonlocalCoupling& coupling,
                                   std::span<const double> probes, double zero_tol = 1e-9) {
  const Grid& g = initial.grid();
  RecordSpec s;
  for (double x : probes) {
    const auto j = g.aligned_index(x, 1e-9);
    if (j < 0)
      throw DomainError("probe x = " + std::to_string(x) + " is not a grid node (dx = " + std::to_string(g.spacing()) + ")");
    s.probes.push_back(x);
    s.probe_nodes.push_back(static_cast<std::size_t>(j));
  }
  const Parity p = classify_parity(initial.values());
  if (coupling.sign() == Sign::Minus && p == Parity::Even) s.parity = Parity::Even;
  if (coupling.sign() == Sign::Plus && p == Parity::Odd) s.parity = Parity::Odd;

  const double h = coupling.shift();
  if (coupling.aligned() && h > 0.0) {
    const double ratio = g.period() / h;
    if (std::abs(ratio - std::round(ratio)) <= 1e-9) {
      const auto k = static_cast<std::size_t>(std::round(ratio));
      for (std::size_t m = 0; m < k; ++m) {
        const auto j = g.wrap_index(static_cast<std::ptrdiff_t>(m) * coupling.offset_cells());
        if (std::abs(initial[j]) < zero_tol) s.zero_nodes.push_back(j);
      }
    }
  }
  return s;
}

/// One diagnostics row; derivatives are always spectral.
struct RecordRow {
  double t = 0.0;
  double max_abs_u = 0.0;
  double max_abs_ux = 0.0;
  double argmax_ux = 0.0;
  std::array<double, monitored_sobolev_orders> sobolev{};
  std::vector<double> probe_u;
  std::vector<double> probe_ux;
  double parity_violation = 0.0;
  double zero_violation = 0.0;
  /// Relative L2 amplitude of the top third of Fourier modes.
  double spectral_tail = 0.0;
};

namespace detail {

/// Fills `row` from u and its coefficients (modes 0..N/2); `ux` receives the spectral derivative.
inline void fill_row(RecordRow& row, std::span<const double> u, std::vector<Complex>& coeffs, std::span<double> ux,
                     const Grid& g, const RecordSpec& spec, SpectralTransform& fft) {
  const std::size_t nyq = coeffs.size() - 1;
  double total = 0.0, tail = 0.0;
  for (std::size_t k = 1; k <= nyq; ++k) {
    const double e = (k == nyq ? 1.0 : 2.0) * std::norm(coeffs[k]);
    total += e;
    if (3 * k > 2 * nyq) tail += e;
  }
  row.spectral_tail = total > 0.0 ? std::sqrt(tail / total) : 0.0;
  for (std::size_t m = 1; m <= monitored_sobolev_orders; ++m)
    row.sobolev[m - 1] = m <= max_sobolev_order(g.size())
                             ? std::sqrt(g.period() * weighted_mode_energy(coeffs, g.period(), m))
                             : std::numeric_limits<double>::quiet_NaN();

  spectral_derivative_from_coeffs(coeffs, ux, g.period(), fft);

  row.max_abs_u = 0.0;
  for (double v : u) row.max_abs_u = std::max(row.max_abs_u, std::abs(v));
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t j = 0; j < ux.size(); ++j)
    if (std::abs(ux[j]) > best) best = std::abs(ux[j]), arg = j;
  row.max_abs_ux = best;
  row.argmax_ux = g.node(arg);

  row.probe_u.clear();
  row.probe_ux.clear();
  for (std::size_t j : spec.probe_nodes) {
    row.probe_u.push_back(u[j]);
    row.probe_ux.push_back(ux[j]);
  }
  row.parity_violation = spec.parity == Parity::Neither ? 0.0 : parity_defect(u, spec.parity);
  row.zero_violation = 0.0;
  for (std::size_t j : spec.zero_nodes) row.zero_violation = std::max(row.zero_violation, std::abs(u[j]));
}

}  // namespace detail

/// Computes one diagnostics row for `field`.
inline RecordRow record(const Field& field, const RecordSpec& spec) {
  require_finite(field, "record");
  auto& fft = spectral_transform(field.size());
  std::vector<Complex> coeffs(fft.modes());
  fft.forward(field.values(), coeffs);
  std::vector<double> ux(field.size());
  RecordRow row;
  row.t = field.time();
  detail::fill_row(row, field.values(), coeffs, ux, field.grid(), spec, fft);
  return row;
}

inline RecordRow record(const Field& field, const NonlocalCoupling& coupling, std::span<const double> probes) {
  return record(field, make_record_spec(field, coupling, probes));
}

/// Column-wise time series of diagnostics rows.
struct RunRecord {
  RecordSpec spec;
  std::vector<double> times;
  std::vector<double> max_abs_u;
  std::vector<double> max_abs_ux;
  std::vector<double> argmax_ux_location;
  std::array<std::vector<double>, monitored_sobolev_orders> sobolev;
  std::vector<std::vector<double>> probe_u;   // [probe][row]
  std::vector<std::vector<double>> probe_ux;  // [probe][row]
  std::vector<double> parity_violation;
  std::vector<double> zero_violation;
  std::vector<double> spectral_tail;

  std::size_t rows() const noexcept { return times.size(); }

  void append(const RecordRow& r) {
    if (probe_u.size() != r.probe_u.size()) {
      if (rows() != 0) throw DomainError("RunRecord::append: probe count changed");
      probe_u.resize(r.probe_u.size());
      probe_ux.resize(r.probe_ux.size());
    }
    times.push_back(r.t);
    max_abs_u.push_back(r.max_abs_u);
    max_abs_ux.push_back(r.max_abs_ux);
    argmax_ux_location.push_back(r.argmax_ux);
    for (std::size_t m = 0; m < monitored_sobolev_orders; ++m) sobolev[m].push_back(r.sobolev[m]);
    for (std::size_t p = 0; p < r.probe_u.size(); ++p) {
      probe_u[p].push_back(r.probe_u[p]);
      probe_ux[p].push_back(r.probe_ux[p]);
    }
    parity_violation.push_back(r.parity_violation);
    zero_violation.push_back(r.zero_violation);
    spectral_tail.push_back(r.spectral_tail);
  }

  /// Maximum of a violation series over rows with t <= t_limit.
  static double max_until(const std::vector<double>& series, const std::vector<double>& times, double t_limit) {
    double m = 0.0;
    for (std::size_t i = 0; i < series.size() && times[i] <= t_limit; ++i) m = std::max(m, series[i]);
    return m;
  }
};

struct DeviationReport {
  /// sup over compared rows of |probe u_x - F1| / |F1| (absolute where F1 = 0).
  double relative_sup_deviation = 0.0;
  double window_end = 0.0;
  std::size_t samples = 0;
  std::optional<double> t_star;
  /// |t_estimate - t_star| when both are known.
  std::optional<double> blowup_time_discrepancy;
};

/// Compares a probe's gradient series against an oracle curve on [0, 0.8 t*]
/// (the whole overlap when the curve has no singular time).
inline DeviationReport compare_to_oracle(const RunRecord& rec, const OracleCurve& curve, std::size_t probe_index,
                                         std::optional<double> t_estimate = std::nullopt) {
  if (probe_index >= rec.probe_ux.size())
    throw DomainError("compare_to_oracle: probe index " + std::to_string(probe_index) + " out of range");
  if (curve.times.empty()) throw DomainError("compare_to_oracle: empty oracle curve");
  DeviationReport d;
  d.t_star = curve.t_star;
  d.window_end = curve.t_star ? 0.8 * *curve.t_star : curve.times.back();
  d.window_end = std::min(d.window_end, curve.times.back());
  for (std::size_t i = 0; i < rec.rows(); ++i) {
    const double t = rec.times[i];
    if (t < curve.times.front() || t > d.window_end) continue;
    const double f = curve.value_at(t);
    const double a = rec.probe_ux[probe_index][i];
    const double dev = f != 0.0 ? std::abs(a - f) / std::abs(f) : std::abs(a - f);
    d.relative_sup_deviation = std::max(d.relative_sup_deviation, dev);
    ++d.samples;
  }
  if (d.samples == 0) throw DomainError("compare_to_oracle: record and oracle curve do not overlap in time");
  if (t_estimate && curve.t_star) d.blowup_time_discrepancy = std::abs(*t_estimate - *curve.t_star);
  return d;
}

}  // namespace nlb
