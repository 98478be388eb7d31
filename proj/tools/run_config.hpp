#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nlb/nlb.hpp"

namespace nlb::cli {

struct ConfigError : Error {
  using Error::Error;
};

/// Raw settings keyed by their config-file name.
using Settings = std::map<std::string, std::string>;

enum class KeyType { Real, Integer, Text, Boolean, RealList };

struct KeySpec {
  std::string_view name;
  KeyType type;
  std::string_view help;
};

inline constexpr KeySpec known_keys[] = {
    {"ic", KeyType::Text, "initial condition name"},
    {"k", KeyType::Integer, "mode index of the stationary sine families"},
    {"ic_file", KeyType::Text, "node values for the tabulated initial condition"},
    {"sign", KeyType::Text, "plus or minus"},
    {"h", KeyType::Real, "nonlocal shift"},
    {"L", KeyType::Real, "period"},
    {"N", KeyType::Integer, "grid points (even)"},
    {"scheme", KeyType::Text, "ftcs, rk4-centered or rk4-spectral"},
    {"dt", KeyType::Real, "time step"},
    {"t_end", KeyType::Real, "final time"},
    {"cfl_limit", KeyType::Real, "largest admissible CFL number"},
    {"blowup_gradient_factor", KeyType::Real, "blow-up once max|u_x| exceeds this multiple of its initial value"},
    {"resolution_tolerance", KeyType::Real, "blow-up once the spectral tail exceeds this (0 disables)"},
    {"record_every", KeyType::Integer, "record a row every this many steps"},
    {"probes", KeyType::RealList, "probe locations (grid nodes)"},
    {"dealias", KeyType::Boolean, "2/3-rule filter for rk4-spectral"},
    {"shift_method", KeyType::Text, "auto, grid-offset or spectral-phase"},
    {"dump_fields", KeyType::Integer, "write fields.csv every this many steps (0 = off)"},
    {"out", KeyType::Text, "output directory (oracle: output file, - for stdout)"},
    {"timing", KeyType::Boolean, "write the wall-clock runtime (false writes 0)"},
    {"h_list", KeyType::Text, "sweep shifts, e.g. L/8,L/16,0.05"},
    {"jobs", KeyType::Integer, "concurrent sweep runs"},
    {"picard_tolerance", KeyType::Real, "stop once successive iterates differ by less than this"},
    {"picard_max_iters", KeyType::Integer, "iteration cap"},
    {"interpolation", KeyType::Text, "catmull-rom or spectral"},
    {"direct_dt", KeyType::Real, "step of the direct solver used for comparison"},
    {"f1", KeyType::Real, "F1(0)"},
    {"f2", KeyType::Real, "F2(0)"},
};

inline const KeySpec* find_key(std::string_view name) {
  for (const auto& k : known_keys)
    if (k.name == name) return &k;
  return nullptr;
}

/// Command-line spelling of a key: --t-end for t_end.
inline std::string flag_name(std::string_view key) {
  std::string f = "--";
  for (char c : key) f += c == '_' ? '-' : c;
  return f;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

/// Parses `key = value` lines; `#` starts a comment. Later lines win.
inline Settings parse_settings(std::istream& in, const std::string& source = "config") {
  Settings s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!find_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    s[key] = value;
  }
  return s;
}

inline Settings read_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_settings(in, path.string());
}

inline double parse_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("'" + key + "': not a finite number: '" + v + "'");
  return x;
}

inline long long parse_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("'" + key + "': not an integer: '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("'" + key + "': expected true or false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Everything one run needs, with defaults materialized.
struct RunConfig {
  std::string ic;
  int k = 1;
  std::string ic_file;
  Sign sign = Sign::Plus;
  double h = 0.0;
  double L = 0.0;
  std::size_t N = 0;
  SolverConfig solver;
  std::size_t dump_fields = 0;
  std::string out = "nlb-out";
  bool timing = true;
  std::vector<std::string> h_list;
  std::size_t jobs = 1;
  PicardOptions picard;
  double direct_dt = 1e-4;
  double f1 = 0.0;
  double f2 = 0.0;
};

inline Scheme parse_scheme(const std::string& v) {
  if (v == "ftcs") return Scheme::FTCS;
  if (v == "rk4-centered") return Scheme::RK4Centered;
  if (v == "rk4-spectral") return Scheme::RK4Spectral;
  throw ConfigError("'scheme': expected ftcs, rk4-centered or rk4-spectral, got '" + v + "'");
}

inline ShiftMethod parse_shift_method(const std::string& v) {
  if (v == "auto") return ShiftMethod::Auto;
  if (v == "grid-offset") return ShiftMethod::GridOffset;
  if (v == "spectral-phase") return ShiftMethod::SpectralPhase;
  throw ConfigError("'shift_method': expected auto, grid-offset or spectral-phase, got '" + v + "'");
}

inline const char* to_string(ShiftMethod m) noexcept {
  switch (m) {
    case ShiftMethod::GridOffset: return "grid-offset";
    case ShiftMethod::SpectralPhase: return "spectral-phase";
    default: return "auto";
  }
}

inline Interpolation parse_interpolation(const std::string& v) {
  if (v == "catmull-rom") return Interpolation::CatmullRom;
  if (v == "spectral") return Interpolation::Spectral;
  throw ConfigError("'interpolation': expected catmull-rom or spectral, got '" + v + "'");
}

inline const char* to_string(Interpolation i) noexcept {
  return i == Interpolation::CatmullRom ? "catmull-rom" : "spectral";
}

inline std::size_t parse_count(const std::string& key, const std::string& v, long long min) {
  const long long x = parse_integer(key, v);
  if (x < min) throw ConfigError("'" + key + "' must be at least " + std::to_string(min));
  return static_cast<std::size_t>(x);
}

/// Checks that every key in `required` is present; the message lists all of them.
inline void require_keys(const Settings& s, const std::vector<std::string>& required) {
  std::vector<std::string> missing;
  for (const auto& k : required)
    if (!s.count(k)) missing.push_back(k);
  if (missing.empty()) return;
  std::string msg = "missing required setting(s):";
  for (const auto& k : missing) msg += " " + flag_name(k);
  msg += " (required:";
  for (const auto& k : required) msg += " " + flag_name(k);
  msg += ")";
  throw ConfigError(msg);
}

/// Converts raw settings into a typed configuration; unset keys keep their defaults.
inline RunConfig resolve(const Settings& s) {
  RunConfig c;
  for (const auto& [key, v] : s) {
    if (!find_key(key)) throw ConfigError("unknown key '" + key + "'");
    if (key == "ic") c.ic = v;
    else if (key == "k") c.k = static_cast<int>(parse_integer(key, v));
    else if (key == "ic_file") c.ic_file = v;
    else if (key == "sign") {
      if (v == "plus") c.sign = Sign::Plus;
      else if (v == "minus") c.sign = Sign::Minus;
      else throw ConfigError("'sign': expected plus or minus, got '" + v + "'");
    } else if (key == "h") c.h = parse_real(key, v);
    else if (key == "L") c.L = parse_real(key, v);
    else if (key == "N") c.N = parse_count(key, v, 1);
    else if (key == "scheme") c.solver.scheme = parse_scheme(v);
    else if (key == "dt") c.solver.dt = parse_real(key, v);
    else if (key == "t_end") c.solver.t_end = parse_real(key, v);
    else if (key == "cfl_limit") c.solver.cfl_limit = parse_real(key, v);
    else if (key == "blowup_gradient_factor") c.solver.blowup_gradient_factor = parse_real(key, v);
    else if (key == "resolution_tolerance") c.solver.resolution_tolerance = parse_real(key, v);
    else if (key == "record_every") c.solver.record_every = parse_count(key, v, 1);
    else if (key == "probes") {
      c.solver.probes.clear();
      for (const auto& item : split_list(v)) c.solver.probes.push_back(parse_real(key, item));
    } else if (key == "dealias") c.solver.dealias = parse_bool(key, v);
    else if (key == "shift_method") c.solver.shift_method = parse_shift_method(v);
    else if (key == "dump_fields") c.dump_fields = parse_count(key, v, 0);
    else if (key == "out") c.out = v;
    else if (key == "timing") c.timing = parse_bool(key, v);
    else if (key == "h_list") c.h_list = split_list(v);
    else if (key == "jobs") c.jobs = parse_count(key, v, 1);
    else if (key == "picard_tolerance") c.picard.tolerance = parse_real(key, v);
    else if (key == "picard_max_iters") c.picard.max_iters = parse_count(key, v, 1);
    else if (key == "interpolation") c.picard.interpolation = parse_interpolation(v);
    else if (key == "direct_dt") c.direct_dt = parse_real(key, v);
    else if (key == "f1") c.f1 = parse_real(key, v);
    else if (key == "f2") c.f2 = parse_real(key, v);
  }
  return c;
}

/// Evaluates one h_list entry: a number, "L", or "L/d".
inline double parse_shift_expr(const std::string& item, double L) {
  if (item == "L") return L;
  if (item.rfind("L/", 0) == 0) {
    const double d = parse_real("h_list", item.substr(2));
    if (d == 0.0) throw ConfigError("'h_list': division by zero in '" + item + "'");
    return L / d;
  }
  return parse_real("h_list", item);
}

inline InitialCondition make_ic(const RunConfig& c) {
  if (c.ic == "plus-blowup-poly") return InitialCondition::plus_blowup_poly(c.h);
  if (c.ic == "minus-blowup-rational") return InitialCondition::minus_blowup_rational();
  if (c.ic == "stationary-minus-sine") return InitialCondition::stationary_minus_sine(c.k, c.h);
  if (c.ic == "stationary-plus-sine") return InitialCondition::stationary_plus_sine(c.k, c.h);
  if (c.ic == "plain-sine") return InitialCondition::plain_sine(c.L);
  if (c.ic == "tabulated") {
    if (c.ic_file.empty()) throw ConfigError("ic = tabulated needs --ic-file");
    return InitialCondition::tabulated(c.ic_file);
  }
  throw ConfigError("unknown ic '" + c.ic +
                    "' (expected plus-blowup-poly, minus-blowup-rational, stationary-minus-sine, "
                    "stationary-plus-sine, plain-sine or tabulated)");
}

/// The resolved configuration as JSON; every setting appears, defaults included.
inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["ic"] = c.ic;
  j["k"] = c.k;
  j["ic_file"] = c.ic_file;
  j["sign"] = to_string(c.sign);
  j["h"] = c.h;
  j["L"] = c.L;
  j["N"] = c.N;
  j["scheme"] = to_string(c.solver.scheme);
  j["dt"] = c.solver.dt;
  j["t_end"] = c.solver.t_end;
  j["cfl_limit"] = c.solver.cfl_limit;
  j["blowup_gradient_factor"] = c.solver.blowup_gradient_factor;
  j["resolution_tolerance"] = c.solver.resolution_tolerance;
  j["record_every"] = c.solver.record_every;
  j["probes"] = c.solver.probes;
  j["dealias"] = c.solver.dealias;
  j["shift_method"] = to_string(c.solver.shift_method);
  j["dump_fields"] = c.dump_fields;
  j["out"] = c.out;
  j["timing"] = c.timing;
  j["h_list"] = c.h_list;
  j["jobs"] = c.jobs;
  j["picard_tolerance"] = c.picard.tolerance;
  j["picard_max_iters"] = c.picard.max_iters;
  j["interpolation"] = to_string(c.picard.interpolation);
  j["direct_dt"] = c.direct_dt;
  j["f1"] = c.f1;
  j["f2"] = c.f2;
  return j;
}

/// 17 significant digits: parses back to the same double.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace nlb::cli
