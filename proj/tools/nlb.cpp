#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace nlb::cli;

const std::vector<std::string> run_keys{"ic", "k", "ic_file", "sign", "h", "L", "N", "scheme", "dt", "t_end",
                                        "cfl_limit", "blowup_gradient_factor", "resolution_tolerance",
                                        "record_every", "probes", "dealias", "shift_method", "dump_fields", "out",
                                        "timing"};

struct Subcommand {
  explicit Subcommand(CLI::App* a) : app(a) {}

  CLI::App* app;
  std::string config_path;
  bool no_timing = false;
  std::map<std::string, std::string> flags;
};

const char* type_name(KeyType t) {
  switch (t) {
    case KeyType::Real: return "REAL";
    case KeyType::Integer: return "INT";
    case KeyType::Boolean: return "true|false";
    case KeyType::RealList: return "REAL,...";
    default: return "TEXT";
  }
}

void add_keys(Subcommand& s, const std::vector<std::string>& keys) {
  s.app->add_option("--config", s.config_path, "settings file of key = value lines");
  for (const auto& k : keys) {
    const auto* spec = find_key(k);
    s.app->add_option(flag_name(k), s.flags[k], std::string(spec->help))->type_name(type_name(spec->type));
  }
}

/// File settings first, then every flag given on the command line.
Settings collect(const Subcommand& s) {
  Settings out = s.config_path.empty() ? Settings{} : read_settings(s.config_path);
  for (const auto& [key, value] : s.flags)
    if (s.app->count(flag_name(key)) > 0) out[key] = value;
  if (s.no_timing) out["timing"] = "false";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Burgers solver: simulations, shift sweeps, Picard iteration and gradient oracles"};
  // -h is left free: --h is the shift.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  Subcommand sim{app.add_subcommand("simulate", "run one simulation; writes record.csv and report.json")};
  add_keys(sim, run_keys);
  sim.app->add_flag("--no-timing", sim.no_timing, "write runtime_seconds = 0 for byte-identical reports");

  Subcommand sweep{app.add_subcommand("sweep", "simulate once per shift in --h-list; writes summary.csv")};
  auto sweep_keys = run_keys;
  std::erase(sweep_keys, "h");
  sweep_keys.insert(sweep_keys.end(), {"h_list", "jobs"});
  add_keys(sweep, sweep_keys);
  sweep.app->add_flag("--no-timing", sweep.no_timing, "write runtime_seconds = 0 for byte-identical reports");

  Subcommand pic{app.add_subcommand("picard", "Picard iteration compared with the direct solver")};
  auto picard_keys = run_keys;
  picard_keys.insert(picard_keys.end(), {"picard_tolerance", "picard_max_iters", "interpolation", "direct_dt"});
  add_keys(pic, picard_keys);

  Subcommand ora{app.add_subcommand("oracle", "closed-form gradient pair F1(t), F2(t) as CSV")};
  add_keys(ora, {"sign", "f1", "f2", "dt", "t_end", "out"});

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim.app) {
      Settings s = collect(sim);
      require_keys(s, simulate_required());
      return cmd_simulate(resolve(s), std::cout);
    }
    if (*sweep.app) {
      Settings s = collect(sweep);
      if (!s.count("jobs"))
        if (const char* env = std::getenv("NLB_JOBS")) s["jobs"] = env;
      require_keys(s, {"ic", "sign", "L", "N", "h_list"});
      return cmd_sweep(resolve(s), std::cerr);
    }
    if (*pic.app) {
      Settings s = collect(pic);
      require_keys(s, simulate_required());
      return cmd_picard(resolve(s), std::cout);
    }
    Settings s = collect(ora);
    require_keys(s, {"sign", "f1", "f2"});
    const RunConfig c = resolve(s);
    if (!s.count("out") || c.out == "-") return cmd_oracle(c, std::cout);
    auto f = open_out(c.out);
    return cmd_oracle(c, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Failure;
  }
}
