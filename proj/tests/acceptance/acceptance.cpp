// Acceptance suite: one PASS/FAIL line per criterion, plus indented info lines.
// Exit status is the number of failed criteria (capped at 125).
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nlb/nlb.hpp"
#include "test_support.hpp"

using namespace nlb;
using nlb::testing::random_smooth;
using nlb::testing::sample;

namespace {

const double pi = std::numbers::pi;
int failures = 0;

void verdict(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& s) {
  std::printf("       %s\n", s.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ------------------------------------------------------------------------------------------

void plus_blowup_time() {
  const Grid g(512, 2.0);
  const auto u0 = InitialCondition::plus_blowup_poly(1.0);
  const NonlocalCoupling c(Sign::Plus, 1.0, g);
  SolverConfig cfg;
  cfg.scheme = Scheme::RK4Spectral;
  cfg.dt = 1e-4;
  cfg.record_every = 10;
  cfg.probes = {0.0};
  const auto res = simulate(u0, c, g, cfg);

  const GradientPair pair{u0.slope(0.0), u0.slope(1.0), Sign::Plus};
  const double t_star = *blowup_time(pair);
  std::vector<double> times;
  for (int i = 0; i <= 4000; ++i) times.push_back(1e-4 * i);
  const auto curve = sample_closed_form(pair, times);
  const auto dev = compare_to_oracle(res.record, curve, 0, res.verdict.t_estimate);
  const double covered = std::min(dev.window_end, res.record.times.back());

  const bool time_ok = res.verdict.t_estimate && std::abs(*res.verdict.t_estimate - 0.5) <= 0.05;
  const bool probe_ok = dev.relative_sup_deviation <= 0.02 && covered >= 0.4 - 1e-9;
  verdict(1, "plus-case blow-up time", time_ok && probe_ok,
          fmt("t* = %.6g from u_x(0,0) = %.6g; t_estimate = %.6g (|diff| %.3g <= 0.05: %s); probe u_x(0,t) max rel "
              "deviation %.4g on [0, %.4g] (<= 0.02 on [0, 0.4]: %s)",
              t_star, pair.f1_0, res.verdict.t_estimate.value_or(NAN), std::abs(res.verdict.t_estimate.value_or(NAN) - 0.5),
              time_ok ? "yes" : "no", dev.relative_sup_deviation, covered, probe_ok ? "yes" : "no"));
  info(fmt("detection: %s at t = %.4g, x = %.4g", to_string(res.verdict.reason), res.verdict.t_detect.value_or(NAN),
           res.verdict.location.value_or(NAN)));
  for (double t : {0.0, 0.1, 0.2, 0.3}) {
    const auto i = static_cast<std::size_t>(std::lower_bound(res.record.times.begin(), res.record.times.end(), t - 1e-12) -
                                            res.record.times.begin());
    if (i >= res.record.rows()) break;
    const double f = closed_form(pair, res.record.times[i]);
    info(fmt("t = %.2f: u_x(0,t) = %.6f, oracle %.6f, rel. deviation %.4f", res.record.times[i], res.record.probe_ux[0][i],
             f, std::abs(res.record.probe_ux[0][i] - f) / std::abs(f)));
  }
}

// ------------------------------------------------------------------------------------------

Field negate(const Field& f) {
  std::vector<double> v(f.data());
  for (auto& x : v) x = -x;
  return f.with_values(std::move(v));
}

void minus_blowup() {
  const Grid g(768, 8.0);
  const double h = 4.0 / 3.0;
  const auto u0 = InitialCondition::minus_blowup_rational();
  const NonlocalCoupling c(Sign::Minus, h, g);
  const auto report = validate_assumptions(u0, c, g);

  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.probes = {h, 2.0 * h};
  const auto res = simulate(u0, c, g, cfg);
  const auto t_est = res.verdict.t_estimate;

  std::string failed;
  for (const auto& chk : report.checks)
    if (!chk.passed) failed += (failed.empty() ? "" : "; ") + chk.name + " (value " + fmt("%.10g", chk.value) + ")";
  const bool ok = report.passed && report.t_star && t_est && std::abs(*t_est - *report.t_star) <= 0.1 * *report.t_star;
  verdict(2, "minus-case blow-up", ok,
          fmt("F1(0) = u_x(h,0) = %.12g, F2(0) = u_x(2h,0) = %.12g; hypotheses %s%s; B %s; run t_estimate = %.6g at x = %.4g",
              report.f1_0.value_or(NAN), report.f2_0.value_or(NAN), report.passed ? "hold" : "violated: ",
              failed.c_str(), report.t_star ? fmt("= %.6g", *report.t_star).c_str() : "undefined",
              t_est.value_or(NAN), res.verdict.location.value_or(NAN)));

  // Same profile with the opposite sign, for which every hypothesis holds.
  const Field flipped = negate(evaluate_ic(u0, g));
  const GradientPair pair{-u0.slope(h), -u0.slope(2.0 * h), Sign::Minus};
  const double b = *blowup_time(pair);
  const auto alt = simulate(flipped, c, cfg);
  info(fmt("negated profile: F1(0) = %.6g, F2(0) = %.6g, B = %.6g; t_estimate = %.6g (rel. error %.3g) at x = %.4g",
           pair.f1_0, pair.f2_0, b, alt.verdict.t_estimate.value_or(NAN),
           std::abs(alt.verdict.t_estimate.value_or(NAN) - b) / b, alt.verdict.location.value_or(NAN)));
}

// ------------------------------------------------------------------------------------------

void global_regularity() {
  struct Case {
    const char* name;
    Field u0;
    NonlocalCoupling c;
  };
  const Grid g(256, 2.0);
  std::vector<Case> cases{
      {"stationary minus sine (k = 1, h = 1)", evaluate_ic(InitialCondition::stationary_minus_sine(1, 1.0), g),
       NonlocalCoupling(Sign::Minus, 1.0, g)},
      {"stationary minus sine (k = 2, h = 1)", evaluate_ic(InitialCondition::stationary_minus_sine(2, 1.0), g),
       NonlocalCoupling(Sign::Minus, 1.0, g)},
      {"stationary plus sine (k = 1, h = 0.5)", evaluate_ic(InitialCondition::stationary_plus_sine(1, 0.5), g),
       NonlocalCoupling(Sign::Plus, 0.5, g)},
      {"stationary plus sine (k = 2, h = 1.5)", evaluate_ic(InitialCondition::stationary_plus_sine(2, 1.5), g),
       NonlocalCoupling(Sign::Plus, 1.5, g)},
      {"minus sign, h = L", evaluate_ic(InitialCondition::plus_blowup_poly(1.0), g), NonlocalCoupling(Sign::Minus, 2.0, g)},
  };
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 1.0;
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  std::vector<std::string> lines;
  for (const auto& k : cases) {
    const auto r = simulate(k.u0, k.c, cfg);
    const double dev = sup_distance(r.final_field, k.u0);
    const bool reached = std::abs(r.final_field.time() - 1.0) < 1e-9;
    const bool case_ok = !r.verdict.blew_up && reached && dev <= 1e-6;
    ok &= case_ok;
    worst = std::max(worst, dev);
    if (!case_ok) detail += std::string(" failed: ") + k.name + ";";
    lines.push_back(fmt("%s: t = %.6g, sup deviation %.3g, blew_up %s", k.name, r.final_field.time(), dev,
             r.verdict.blew_up ? "yes" : "no"));
  }
  verdict(3, "global regularity", ok, fmt("%zu runs to t = 1, max sup deviation %.3g (<= 1e-6)%s", cases.size(), worst,
                                          detail.c_str()));
  for (const auto& l : lines) info(l);
}

// ------------------------------------------------------------------------------------------

void conservation() {
  struct Case {
    const char* name;
    InitialCondition u0;
    Grid g;
    NonlocalCoupling c;
  };
  const Grid gp(512, 2.0), gm(768, 8.0);
  std::vector<Case> cases{
      {"plus data", InitialCondition::plus_blowup_poly(1.0), gp, NonlocalCoupling(Sign::Plus, 1.0, gp)},
      {"minus data", InitialCondition::minus_blowup_rational(), gm, NonlocalCoupling(Sign::Minus, 4.0 / 3.0, gm)},
  };
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.record_every = 1;
  bool ok = true;
  std::string detail;
  for (const auto& k : cases) {
    const auto r = simulate(k.u0, k.c, k.g, cfg);
    const double t_end = r.verdict.blew_up ? *r.verdict.t_detect : r.record.times.back();
    const double window = 0.8 * t_end;
    const auto& rec = r.record;
    const double pmax = RunRecord::max_until(rec.parity_violation, rec.times, window);
    const double zmax = RunRecord::max_until(rec.zero_violation, rec.times, window);
    const bool channels = rec.spec.parity != Parity::Neither && !rec.spec.zero_nodes.empty();
    const bool case_ok = channels && pmax <= 1e-6 && zmax <= 1e-6;
    ok &= case_ok;
    detail += fmt("%s%s: %s parity max %.3g, %zu lattice zeros max %.3g on [0, %.4g]", detail.empty() ? "" : "; ", k.name,
                  to_string(rec.spec.parity), pmax, rec.spec.zero_nodes.size(), zmax, window);
  }
  verdict(4, "zero and parity conservation", ok, detail + " (each <= 1e-6)");
}

// ------------------------------------------------------------------------------------------

void burgers_reduction() {
  const Grid g(512, 2.0);
  auto f0 = [](double x) { return std::sin(pi * x); };
  auto df0 = [](double x) { return pi * std::cos(pi * x); };
  const NonlocalCoupling c(Sign::Plus, 2.0, g);
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.snapshot_every = 50;
  const auto r = simulate(sample(g, f0), c, cfg);
  const double t_shock = 1.0 / (2.0 * pi);
  double worst = 0.0;
  std::size_t compared = 0;
  for (const auto& snap : r.snapshots) {
    if (snap.time() > 0.8 * t_shock) break;
    const auto exact = burgers_characteristics(f0, df0, g, snap.time());
    worst = std::max(worst, sup_distance(snap, exact.field));
    ++compared;
  }
  const auto est = r.verdict.t_estimate;
  const bool covered = !r.snapshots.empty() && compared > 0 && r.record.times.back() >= 0.8 * t_shock - 1e-9;
  const bool ok = covered && worst <= 1e-3 && est && std::abs(*est - t_shock) <= 0.1 * t_shock;
  verdict(5, "Burgers reduction", ok,
          fmt("sup error vs characteristics %.3g over %zu snapshots on [0, %.4g] (<= 1e-3); shock estimate %.6g vs "
              "1/(2 pi) = %.6g (rel. error %.3g <= 0.1)",
              worst, compared, 0.8 * t_shock, est.value_or(NAN), t_shock, std::abs(est.value_or(NAN) - t_shock) / t_shock));
}

// ------------------------------------------------------------------------------------------

void picard_vs_direct() {
  const Grid g(256, 2.0);
  const auto u0 = evaluate_ic(InitialCondition::plus_blowup_poly(1.0), g);
  const NonlocalCoupling c(Sign::Plus, 1.0, g);
  const double T = 0.05, dt = 1e-3, direct_dt = 1e-4;
  PicardOptions opt;
  opt.tolerance = 1e-8;
  opt.max_iters = 10;
  opt.keep_iterates = false;
  const auto pr = picard_solve(u0, c, T, dt, opt);

  SolverConfig cfg;
  cfg.dt = direct_dt;
  cfg.t_end = T;
  cfg.snapshot_every = 10;
  const auto d = simulate(u0, c, cfg);
  double worst = 0.0;
  const std::size_t frames = std::min(d.snapshots.size(), pr.solution.size());
  for (std::size_t n = 0; n < frames; ++n) worst = std::max(worst, sup_distance(d.snapshots[n], pr.solution[n]));
  const bool ok = pr.trace.converged && pr.trace.iterations() <= 10 && frames == pr.solution.size() && worst <= 1e-4;
  std::string deltas;
  for (double x : pr.trace.sup_deltas) deltas += fmt("%s%.2e", deltas.empty() ? "" : ", ", x);
  verdict(6, "Picard vs direct", ok,
          fmt("%s after %zu iterations (deltas %s); sup error vs direct solver %.3g over %zu frames (<= 1e-4)",
              pr.trace.converged ? "converged" : "not converged", pr.trace.iterations(), deltas.c_str(), worst, frames));
}

// ------------------------------------------------------------------------------------------

void oracle_properties() {
  std::mt19937_64 rng(20240229);
  std::uniform_real_distribution<double> mag(0.1, 5.0);
  double worst_value = 0.0, worst_drift = 0.0;
  int pairs = 0;
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    for (int i = 0; i < 100; ++i, ++pairs) {
      const GradientPair p = s == Sign::Plus ? GradientPair{-mag(rng), -mag(rng), s} : GradientPair{mag(rng), -mag(rng), s};
      const double ts = *blowup_time(p);
      const auto curve = ode_integrate_pair(p, 1e-4 * ts, 0.9 * ts);
      for (std::size_t k = 0; k < curve.times.size(); ++k) {
        const double f = closed_form(p, curve.times[k]);
        worst_value = std::max(worst_value, std::abs(curve.values[k] - f) / std::max(1.0, std::abs(f)));
        const double inv = s == Sign::Plus ? curve.values[k] - curve.partner[k] : curve.values[k] + curve.partner[k];
        worst_drift = std::max(worst_drift, std::abs(inv - p.invariant()));
      }
    }
  }
  verdict(7, "oracle property suite", worst_value <= 1e-6 && worst_drift <= 1e-8,
          fmt("%d pairs: closed form vs RK4 max deviation %.3g (<= 1e-6, relative where |F1| > 1) on [0, 0.9 t*]; "
              "invariant drift %.3g (<= 1e-8)",
              pairs, worst_value, worst_drift));
}

// ------------------------------------------------------------------------------------------

void operator_identities() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> shift(0.0, 2.0);
  const Grid g(128, 2.0);
  double plus_err = 0.0, minus_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto u = sample(g, random_smooth(rng, 2.0, 16));
    // alternate grid-aligned and arbitrary shifts
    double h = shift(rng);
    if (i % 2 == 0) h = std::round(h / g.spacing()) * g.spacing();
    const NonlocalCoupling p(Sign::Plus, h, g), m(Sign::Minus, h, g);
    plus_err = std::max(plus_err, sup_distance(shift_combine(u, p), shift_combine(u, p.reflected())));
    const auto a = shift_combine(u, m), b = shift_combine(u, m.reflected());
    for (std::size_t j = 0; j < g.size(); ++j) minus_err = std::max(minus_err, std::abs(a[j] + b[j]));
  }

  const Grid gs(256, 2.0);
  const auto u0 = sample(gs, random_smooth(rng, 2.0, 4));
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.1;
  cfg.record_every = 1;
  cfg.snapshot_every = 1;
  double sol_err = 0.0;
  for (double h : {0.25, 0.5, 0.3}) {
    const NonlocalCoupling c(Sign::Plus, h, gs);
    const auto ra = simulate(u0, c, cfg), rb = simulate(u0, c.reflected(), cfg);
    const std::size_t n = std::min(ra.snapshots.size(), rb.snapshots.size());
    if (ra.snapshots.size() != rb.snapshots.size()) sol_err = INFINITY;
    for (std::size_t k = 0; k < n; ++k) sol_err = std::max(sol_err, sup_distance(ra.snapshots[k], rb.snapshots[k]));
  }
  verdict(8, "operator identities", plus_err <= 1e-12 && minus_err <= 1e-12 && sol_err <= 1e-8,
          fmt("1000 fields: plus L_h vs L_{L-h} %.3g, minus L_{L-h} + L_h %.3g (<= 1e-12); plus solutions h vs L-h "
              "%.3g at every step (<= 1e-8)",
              plus_err, minus_err, sol_err));
}

// ------------------------------------------------------------------------------------------

void h_sweep() {
  const double L = 2.0;
  const Grid g(512, L);
  const auto u0 = evaluate_ic(InitialCondition::plain_sine(L), g);
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 2.0;
  std::vector<double> dist, loc, est;
  for (double d : {8.0, 16.0, 32.0}) {
    const auto r = simulate(u0, NonlocalCoupling(Sign::Plus, L / d, g), cfg);
    const double x = r.verdict.location.value_or(NAN);
    loc.push_back(x);
    dist.push_back(std::min(x, L - x));
    est.push_back(r.verdict.t_estimate.value_or(NAN));
  }
  const bool ok = dist[0] > dist[1] && dist[1] > dist[2];
  verdict(9, "h-sweep trend", ok,
          fmt("h = L/8, L/16, L/32: blow-up location %.5g, %.5g, %.5g; distance from origin %.5g, %.5g, %.5g "
              "(strictly decreasing required)",
              loc[0], loc[1], loc[2], dist[0], dist[1], dist[2]));
  info(fmt("estimated blow-up times %.5g, %.5g, %.5g; distance from x = L/2 (steepest descent of u0): %.5g, %.5g, %.5g",
           est[0], est[1], est[2], std::abs(loc[0] - L / 2), std::abs(loc[1] - L / 2), std::abs(loc[2] - L / 2)));
}

}  // namespace

int main() {
  plus_blowup_time();
  minus_blowup();
  global_regularity();
  conservation();
  burgers_reduction();
  picard_vs_direct();
  oracle_properties();
  operator_identities();
  h_sweep();
  std::printf("%d of 9 criteria failed\n", failures);
  return std::min(failures, 125);
}
