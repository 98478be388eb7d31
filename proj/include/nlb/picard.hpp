#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nlb/calculus.hpp"
#include "nlb/coupling.hpp"
#include "nlb/error.hpp"
#include "nlb/grid.hpp"
#include "nlb/interpolation.hpp"

namespace nlb {

/// Fields at t_n = n dt, n = 0..M.
using Trajectory = std::vector<Field>;

namespace detail {

inline std::size_t step_count(double dt, double t_end) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw DomainError("dt and t_end must be positive");
  const double m = t_end / dt;
  const double r = std::round(m);
  if (r < 1.0 || std::abs(m - r) > 1e-9 * std::max(1.0, m))
    throw DomainError("t_end = " + std::to_string(t_end) + " is not a whole number of steps dt = " + std::to_string(dt));
  return static_cast<std::size_t>(r);
}

inline double frame_time(std::size_t n, std::size_t steps, double dt, double t_end) {
  return n == steps ? t_end : static_cast<double>(n) * dt;
}

}  // namespace detail

/// Semi-Lagrangian solution of v_t + a(x, t) v_x = 0.
///
/// Each step traces the characteristic foot backward with the midpoint rule, using the
/// velocity linearly interpolated to t_{n+1/2}, and evaluates the previous frame there.
inline Trajectory advect_linear(const Trajectory& velocity, const Field& ic, double dt, double t_end,
                                Interpolation interp = Interpolation::CatmullRom) {
  const std::size_t steps = detail::step_count(dt, t_end);
  if (velocity.size() != steps + 1)
    throw DomainError("advect_linear: velocity trajectory has " + std::to_string(velocity.size()) +
                      " frames, expected " + std::to_string(steps + 1));
  const Grid& g = ic.grid();
  for (std::size_t n = 0; n <= steps; ++n) {
    if (!(velocity[n].grid() == g)) throw DomainError("advect_linear: velocity frame on a different grid");
    const double expect = detail::frame_time(n, steps, dt, t_end) + ic.time();
    if (std::abs(velocity[n].time() - expect) > 1e-9 * std::max(1.0, expect))
      throw DomainError("advect_linear: velocity frame " + std::to_string(n) + " is at t = " +
                        std::to_string(velocity[n].time()) + ", expected " + std::to_string(expect));
  }
  require_finite(ic, "advect_linear");

  const std::size_t N = g.size();
  const auto x = g.nodes();
  std::vector<double> a_half(N), a_mid(N), xm(N), foot(N), next(N);

  Trajectory out;
  out.reserve(steps + 1);
  out.push_back(ic);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t0 = detail::frame_time(n, steps, dt, t_end);
    const double t1 = detail::frame_time(n + 1, steps, dt, t_end);
    const double h = t1 - t0;
    const auto& a0 = velocity[n].values();
    const auto& a1 = velocity[n + 1].values();
    for (std::size_t j = 0; j < N; ++j) a_half[j] = 0.5 * (a0[j] + a1[j]);
    for (std::size_t j = 0; j < N; ++j) xm[j] = x[j] - 0.5 * h * a_half[j];
    interpolate_at(a_half, xm, a_mid, g, interp);
    for (std::size_t j = 0; j < N; ++j) foot[j] = x[j] - h * a_mid[j];
    interpolate_at(out.back().values(), foot, next, g, interp);
    out.emplace_back(g, next, ic.time() + t1);
  }
  return out;
}

struct IterationTrace {
  /// iterates[0] is the initial data held constant in time.
  std::vector<Trajectory> iterates;
  /// sup over space-time of |u_n - u_{n-1}|, one entry per iteration.
  std::vector<double> sup_deltas;
  /// max over time of the homogeneous H^3 norm of each iterate.
  std::vector<double> h_m_norms;
  bool converged = false;

  std::size_t iterations() const noexcept { return sup_deltas.size(); }
};

struct PicardResult {
  IterationTrace trace;
  Trajectory solution;
};

struct PicardOptions {
  double tolerance = 1e-8;
  std::size_t max_iters = 50;
  Interpolation interpolation = Interpolation::CatmullRom;
  std::size_t sobolev_order = 3;
  /// Keep every iterate in the trace (otherwise only the last two survive).
  bool keep_iterates = true;
};

inline double max_sobolev_over(const Trajectory& tr, std::size_t m) {
  double best = 0.0;
  for (const auto& f : tr) best = std::max(best, sobolev_norm(f, m));
  return best;
}

inline double sup_distance(const Trajectory& a, const Trajectory& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, sup_distance(a[n], b[n]));
  return m;
}

/// Iterates u_n: d_t u_n + (L u_{n-1}) d_x u_n = 0, u_n(x, 0) = u0(x), starting from
/// u_0(x, t) = u0(x), until the space-time sup distance between iterates drops below the tolerance.
inline PicardResult picard_solve(const Field& ic, const NonlocalCoupling& coupling, double T, double dt,
                                 const PicardOptions& opt = {}) {
  require_finite(ic, "picard_solve");
  if (!(ic.grid() == coupling.grid())) throw DomainError("picard_solve: initial field and coupling grids differ");
  if (opt.max_iters == 0) throw DomainError("picard_solve: max_iters must be positive");
  const std::size_t steps = detail::step_count(dt, T);

  Trajectory prev;
  prev.reserve(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) prev.push_back(ic.at_time(ic.time() + detail::frame_time(n, steps, dt, T)));

  PicardResult res;
  const std::size_t m = std::min(opt.sobolev_order, max_sobolev_order(ic.size()));
  res.trace.h_m_norms.push_back(max_sobolev_over(prev, m));
  if (opt.keep_iterates) res.trace.iterates.push_back(prev);

  for (std::size_t it = 0; it < opt.max_iters; ++it) {
    Trajectory velocity;
    velocity.reserve(prev.size());
    for (const auto& f : prev) velocity.push_back(shift_combine(f, coupling));
    Trajectory cur = advect_linear(velocity, ic, dt, T, opt.interpolation);

    const double delta = sup_distance(cur, prev);
    res.trace.sup_deltas.push_back(delta);
    res.trace.h_m_norms.push_back(max_sobolev_over(cur, m));
    if (opt.keep_iterates) res.trace.iterates.push_back(cur);
    prev = std::move(cur);
    if (!std::isfinite(delta)) break;
    if (delta < opt.tolerance) {
      res.trace.converged = true;
      break;
    }
  }
  if (!opt.keep_iterates) res.trace.iterates.push_back(prev);
  res.solution = std::move(prev);
  return res;
}

}  // namespace nlb
