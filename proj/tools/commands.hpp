#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nlb/nlb.hpp"
#include "run_config.hpp"

namespace nlb::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

enum ExitCode : int { Ok = 0, Failure = 1, BlowUp = 2, NotConverged = 3 };

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

inline void write_json(const fs::path& p, const ordered_json& j) {
  auto f = open_out(p);
  f << j.dump(2) << '\n';
}

inline ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

inline void write_record_csv(std::ostream& os, const RunRecord& rec) {
  os << "t,max_u,max_ux,argmax_ux,h1,h2,h3";
  for (double p : rec.spec.probes) os << ",u_at_" << format_real(p) << ",ux_at_" << format_real(p);
  os << '\n';
  for (std::size_t i = 0; i < rec.rows(); ++i) {
    os << format_real(rec.times[i]) << ',' << format_real(rec.max_abs_u[i]) << ',' << format_real(rec.max_abs_ux[i])
       << ',' << format_real(rec.argmax_ux_location[i]);
    for (const auto& s : rec.sobolev) os << ',' << format_real(s[i]);
    for (std::size_t p = 0; p < rec.probe_u.size(); ++p)
      os << ',' << format_real(rec.probe_u[p][i]) << ',' << format_real(rec.probe_ux[p][i]);
    os << '\n';
  }
}

inline void write_fields_csv(std::ostream& os, const std::vector<Field>& snapshots, std::size_t n) {
  os << 't';
  for (std::size_t j = 0; j < n; ++j) os << ",u_" << j;
  os << '\n';
  for (const auto& f : snapshots) {
    os << format_real(f.time());
    for (double v : f.values()) os << ',' << format_real(v);
    os << '\n';
  }
}

/// Builds grid, coupling and initial field from a resolved configuration.
struct Problem {
  Grid grid;
  NonlocalCoupling coupling;
  Field initial;
};

inline Problem make_problem(const RunConfig& c) {
  Grid g(c.N, c.L);
  NonlocalCoupling coupling(c.sign, c.h, g);
  Field u0 = evaluate_ic(make_ic(c), g);
  return {g, std::move(coupling), std::move(u0)};
}

inline const std::vector<std::string>& simulate_required() {
  static const std::vector<std::string> keys{"ic", "sign", "h", "L", "N"};
  return keys;
}

struct SimulateOutcome {
  BlowupVerdict verdict;
  int exit_code = Ok;
};

/// Runs one simulation and writes record.csv, report.json and optionally fields.csv into c.out.
inline SimulateOutcome run_simulation(const RunConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  const Problem prob = make_problem(c);
  SolverConfig sc = c.solver;
  sc.snapshot_every = c.dump_fields;
  const SimulationResult res = simulate(prob.initial, prob.coupling, sc);
  const double runtime =
      c.timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() : 0.0;

  const fs::path dir(c.out);
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "record.csv");
    write_record_csv(f, res.record);
  }
  if (c.dump_fields > 0) {
    auto f = open_out(dir / "fields.csv");
    write_fields_csv(f, res.snapshots, prob.grid.size());
  }

  const auto& v = res.verdict;
  // Conservation checks are only meaningful before the solution degrades near blow-up.
  const double window = v.blew_up ? 0.8 * *v.t_detect : std::numeric_limits<double>::infinity();
  const auto& rec = res.record;
  ordered_json report;
  report["config"] = to_json(c);
  report["blowup"] = {{"blew_up", v.blew_up},
                      {"t_detect", optional_json(v.t_detect)},
                      {"t_estimate", optional_json(v.t_estimate)},
                      {"location", optional_json(v.location)},
                      {"reason", to_string(v.reason)}};
  report["violations"] = {{"parity_max", RunRecord::max_until(rec.parity_violation, rec.times, window)},
                          {"zero_max", RunRecord::max_until(rec.zero_violation, rec.times, window)},
                          {"parity_channel", to_string(rec.spec.parity)},
                          {"zero_nodes", rec.spec.zero_nodes.size()},
                          {"window_end", v.blew_up ? ordered_json(window) : ordered_json(rec.times.back())}};
  report["runtime_seconds"] = runtime;
  write_json(dir / "report.json", report);
  return {v, v.blew_up ? BlowUp : Ok};
}

inline int cmd_simulate(const RunConfig& c, std::ostream& log) {
  const auto out = run_simulation(c);
  const auto& v = out.verdict;
  if (v.blew_up) {
    log << "blow-up detected (" << to_string(v.reason) << ") at t = " << format_real(*v.t_detect);
    if (v.t_estimate) log << ", estimated blow-up time " << format_real(*v.t_estimate);
    if (v.location) log << ", x = " << format_real(*v.location);
    log << '\n';
  } else {
    log << "reached t_end = " << format_real(c.solver.t_end) << " without blow-up\n";
  }
  log << "wrote " << (fs::path(c.out) / "record.csv").string() << " and report.json\n";
  return out.exit_code;
}

struct SweepRow {
  double h = 0.0;
  std::string label;
  std::optional<double> t_estimate;
  std::optional<double> location;
  std::string status;
};

inline std::string optional_cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

/// One simulation per shift; rows keep the h_list order whatever the completion order.
inline int cmd_sweep(const RunConfig& base, std::ostream& log) {
  if (base.h_list.empty()) throw ConfigError("h_list is empty");
  std::vector<SweepRow> rows(base.h_list.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].label = base.h_list[i];
    rows[i].h = parse_shift_expr(base.h_list[i], base.L);
  }
  const fs::path root(base.out);
  fs::create_directories(root);

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      RunConfig c = base;
      c.h = rows[i].h;
      char name[32];
      std::snprintf(name, sizeof name, "h-%02zu", i + 1);
      c.out = (root / name).string();
      try {
        const auto out = run_simulation(c);
        rows[i].t_estimate = out.verdict.t_estimate;
        rows[i].location = out.verdict.location;
        rows[i].status = out.verdict.blew_up ? "blowup" : "clean";
      } catch (const std::exception& e) {
        rows[i].status = "error";
        std::lock_guard lock(log_mutex);
        log << "h = " << rows[i].label << ": " << e.what() << '\n';
      }
    }
  };
  const std::size_t jobs = std::min(base.jobs, rows.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }

  auto f = open_out(root / "summary.csv");
  f << "h,t_estimate,blowup_location,location,status\n";
  bool any_error = false, any_blowup = false;
  for (const auto& r : rows) {
    std::optional<double> dist;
    if (r.location) dist = std::min(*r.location, base.L - *r.location);
    f << format_real(r.h) << ',' << optional_cell(r.t_estimate) << ',' << optional_cell(dist) << ','
      << optional_cell(r.location) << ',' << r.status << '\n';
    any_error |= r.status == "error";
    any_blowup |= r.status == "blowup";
  }
  log << "wrote " << (root / "summary.csv").string() << " (" << rows.size() << " runs)\n";
  if (any_error) return Failure;
  return any_blowup ? BlowUp : Ok;
}

/// Picard iteration plus a direct solve on the same frames; exit 3 if the iteration stalls.
inline int cmd_picard(const RunConfig& c, std::ostream& log) {
  const Problem prob = make_problem(c);
  const double T = c.solver.t_end;
  const double dt = c.solver.dt;
  PicardOptions opt = c.picard;
  opt.keep_iterates = false;
  const PicardResult pr = picard_solve(prob.initial, prob.coupling, T, dt, opt);

  const double ratio = dt / c.direct_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0)
    throw ConfigError("dt must be a whole multiple of direct_dt");
  SolverConfig sc = c.solver;
  sc.dt = c.direct_dt;
  sc.snapshot_every = static_cast<std::size_t>(std::round(ratio));
  const SimulationResult direct = simulate(prob.initial, prob.coupling, sc);

  double sup_error = 0.0;
  const std::size_t frames = std::min(direct.snapshots.size(), pr.solution.size());
  for (std::size_t n = 0; n < frames; ++n) sup_error = std::max(sup_error, sup_distance(direct.snapshots[n], pr.solution[n]));

  const fs::path dir(c.out);
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "deltas.csv");
    f << "iteration,sup_delta,h3_max\n";
    for (std::size_t i = 0; i < pr.trace.sup_deltas.size(); ++i)
      f << i + 1 << ',' << format_real(pr.trace.sup_deltas[i]) << ',' << format_real(pr.trace.h_m_norms[i + 1]) << '\n';
  }
  ordered_json j;
  j["config"] = to_json(c);
  j["converged"] = pr.trace.converged;
  j["iterations"] = pr.trace.iterations();
  j["final_delta"] = pr.trace.sup_deltas.back();
  j["sup_error"] = sup_error;
  j["frames_compared"] = frames;
  j["direct_blew_up"] = direct.verdict.blew_up;
  write_json(dir / "comparison.json", j);

  log << (pr.trace.converged ? "converged" : "did not converge") << " after " << pr.trace.iterations()
      << " iterations; sup error vs direct solver " << format_real(sup_error) << '\n';
  return pr.trace.converged ? Ok : NotConverged;
}

/// Closed-form F1, F2 sampled on n*dt up to t_end, stopping short of the singular time.
inline int cmd_oracle(const RunConfig& c, std::ostream& os) {
  const GradientPair pair{c.f1, c.f2, c.sign};
  const auto t_star = blowup_time(pair);
  const double dt = c.solver.dt;
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  os << "# t_star = " << (t_star ? format_real(*t_star) : std::string("none")) << '\n';
  os << "t,F1,F2\n";
  const auto steps = static_cast<std::size_t>(std::floor(c.solver.t_end / dt + 1e-9));
  for (std::size_t n = 0; n <= steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    if (t_star && t >= *t_star) break;
    const double f1 = closed_form(pair, t);
    os << format_real(t) << ',' << format_real(f1) << ',' << format_real(partner_of(pair, f1)) << '\n';
  }
  return Ok;
}

}  // namespace nlb::cli
