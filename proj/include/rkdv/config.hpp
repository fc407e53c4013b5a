#pragma once

// Experiment configuration: a flat "key = value" text file. Lists are comma
// separated, '#' starts a comment, unknown keys are errors.

#include "rkdv/analysis.hpp"
#include "rkdv/datum.hpp"
#include "rkdv/models.hpp"
#include "rkdv/timestepper.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rkdv {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  double half_width = 10.0 * std::numbers::pi;
  std::size_t points = 2048;
  std::string preset = "rosenau_kdv_reg";
  DatumSpec datum;
  double final_time = 1.0;
  double sample_every = 0.005;
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  double scaling_constant = 1.0;
  double scaling_exponent = 4.0;
  Window window{-5.0 * std::numbers::pi, 5.0 * std::numbers::pi};
  std::vector<double> lp{1.0, 1.5, 2.5, 3.5};
  std::vector<double> kruzkov_levels{-0.5, 0.0, 0.25, 0.5, 0.75};
  double kruzkov_delta = 1e-2;
  double residual_center = 0.5;
  double residual_radius = 0.5;
  double residual_taper = 0.1;
  BumpBattery bumps;
  std::size_t refinement = 4;
  double bound_factor = 10.0;
  StepperOptions stepper;
  std::uint64_t seed = 1;
  std::filesystem::path out = "rkdv_out";
  bool store_runs = false;

  ScalingPath path() const { return ScalingPath(scaling_constant, scaling_exponent); }
  std::size_t reference_cells() const { return refinement * points; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("config key '" + key + "': '" + t + "' is not a number");
  return v;
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("config key '" + key + "': '" + t + "' is not a nonnegative integer");
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("config key '" + key + "': '" + t + "' is not a boolean");
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v[i]);
    if (i) s += ", ";
    s.append(buf, r.ptr);
  }
  return s;
}

inline std::string format_double(double v) { return format_list({v}); }

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct KeyHandler {
  Setter set;
  Getter get;
};

template <class T>
KeyHandler number_key(T ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*m = parse_double(k, v); },
          [m](const ExperimentConfig& c) { return format_double(c.*m); }};
}

inline KeyHandler datum_key(double DatumSpec::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.datum.*m = parse_double(k, v); },
          [m](const ExperimentConfig& c) { return format_double(c.datum.*m); }};
}

inline KeyHandler list_key(std::vector<double> ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*m = parse_list(k, v); },
          [m](const ExperimentConfig& c) { return format_list(c.*m); }};
}

inline KeyHandler count_key(std::size_t ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*m = parse_count(k, v); },
          [m](const ExperimentConfig& c) { return std::to_string(c.*m); }};
}

inline const std::map<std::string, KeyHandler>& config_keys() {
  static const std::map<std::string, KeyHandler> keys = [] {
    std::map<std::string, KeyHandler> k;
    k["half_width"] = number_key(&ExperimentConfig::half_width);
    k["points"] = count_key(&ExperimentConfig::points);
    k["preset"] = {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.preset = trim(v); },
                   [](const ExperimentConfig& c) { return c.preset; }};
    k["datum"] = {[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                    try {
                      c.datum.family = datum_family_from(trim(v));
                    } catch (const std::invalid_argument& e) {
                      throw ConfigError("config key '" + key + "': " + e.what());
                    }
                  },
                  [](const ExperimentConfig& c) { return to_string(c.datum.family); }};
    k["datum.amplitude"] = datum_key(&DatumSpec::amplitude);
    k["datum.sigma"] = datum_key(&DatumSpec::sigma);
    k["datum.center"] = datum_key(&DatumSpec::center);
    k["datum.u_left"] = datum_key(&DatumSpec::u_left);
    k["datum.u_right"] = datum_key(&DatumSpec::u_right);
    k["datum.left_edge"] = datum_key(&DatumSpec::left_edge);
    k["datum.jump"] = datum_key(&DatumSpec::jump);
    k["datum.width"] = datum_key(&DatumSpec::width);
    k["final_time"] = number_key(&ExperimentConfig::final_time);
    k["sample_every"] = number_key(&ExperimentConfig::sample_every);
    k["epsilons"] = list_key(&ExperimentConfig::epsilons);
    k["scaling.constant"] = number_key(&ExperimentConfig::scaling_constant);
    k["scaling.exponent"] = number_key(&ExperimentConfig::scaling_exponent);
    k["window"] = {[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                     const auto w = parse_list(key, v);
                     if (w.size() != 2) throw ConfigError("config key 'window' needs two values: lo, hi");
                     c.window = {w[0], w[1]};
                   },
                   [](const ExperimentConfig& c) { return format_list({c.window.lo, c.window.hi}); }};
    k["lp"] = list_key(&ExperimentConfig::lp);
    k["kruzkov.levels"] = list_key(&ExperimentConfig::kruzkov_levels);
    k["kruzkov.delta"] = number_key(&ExperimentConfig::kruzkov_delta);
    k["residual.center"] = number_key(&ExperimentConfig::residual_center);
    k["residual.radius"] = number_key(&ExperimentConfig::residual_radius);
    k["residual.taper"] = number_key(&ExperimentConfig::residual_taper);
    k["bumps.per_axis_x"] = {
        [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.bumps.per_axis_x = parse_count(key, v); },
        [](const ExperimentConfig& c) { return std::to_string(c.bumps.per_axis_x); }};
    k["bumps.per_axis_t"] = {
        [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.bumps.per_axis_t = parse_count(key, v); },
        [](const ExperimentConfig& c) { return std::to_string(c.bumps.per_axis_t); }};
    k["bumps.radii_x"] = {
        [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.bumps.radii_x = parse_list(key, v); },
        [](const ExperimentConfig& c) { return format_list(c.bumps.radii_x); }};
    k["bumps.radius_t_fraction"] = {
        [](ExperimentConfig& c, const std::string& key, const std::string& v) {
          c.bumps.radius_t_fraction = parse_double(key, v);
        },
        [](const ExperimentConfig& c) { return format_double(c.bumps.radius_t_fraction); }};
    k["bumps.random_extra"] = {
        [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.bumps.random_extra = parse_count(key, v); },
        [](const ExperimentConfig& c) { return std::to_string(c.bumps.random_extra); }};
    k["refinement"] = count_key(&ExperimentConfig::refinement);
    k["bound_factor"] = number_key(&ExperimentConfig::bound_factor);
    k["stepper.cfl"] = {
        [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.stepper.cfl = parse_double(key, v); },
        [](const ExperimentConfig& c) { return format_double(c.stepper.cfl); }};
    k["stepper.stability"] = {
        [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.stepper.stability = parse_double(key, v); },
        [](const ExperimentConfig& c) { return format_double(c.stepper.stability); }};
    k["stepper.dt_max"] = {
        [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.stepper.dt_max = parse_double(key, v); },
        [](const ExperimentConfig& c) { return format_double(c.stepper.dt_max); }};
    k["seed"] = {[](ExperimentConfig& c, const std::string& key, const std::string& v) {
                   c.seed = parse_count(key, v);
                   c.bumps.seed = c.seed;
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }};
    k["out"] = {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.out = trim(v); },
                [](const ExperimentConfig& c) { return c.out.string(); }};
    k["store_runs"] = {
        [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.store_runs = parse_bool(key, v); },
        [](const ExperimentConfig& c) { return std::string(c.store_runs ? "true" : "false"); }};
    return k;
  }();
  return keys;
}

}  // namespace detail

/// Applies one key; throws ConfigError for unknown keys or bad values.
inline void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto& keys = detail::config_keys();
  const auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
}

/// Throws ConfigError unless the configuration is usable.
inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("invalid config: " + m); };
  if (!(c.half_width > 0.0)) fail("half_width must be positive");
  if (c.points < 16 || (c.points & (c.points - 1)) != 0) fail("points must be a power of two >= 16");
  if (!is_preset_name(c.preset)) fail("unknown preset '" + c.preset + "'");
  if (!(c.final_time > 0.0)) fail("final_time must be positive");
  if (!(c.sample_every > 0.0) || c.sample_every > c.final_time) fail("sample_every must lie in (0, final_time]");
  const double steps = c.final_time / c.sample_every;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) fail("final_time must be a multiple of sample_every");
  if (c.epsilons.empty()) fail("epsilons must not be empty");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    if (!(c.epsilons[i] >= 0.0)) fail("epsilons must be nonnegative");
    if (i > 0 && !(c.epsilons[i] < c.epsilons[i - 1])) fail("epsilons must be strictly decreasing");
  }
  if (!(c.scaling_constant > 0.0) || !(c.scaling_exponent > 0.0)) fail("scaling constant and exponent must be positive");
  if (!(c.window.lo < c.window.hi) || c.window.lo < -0.5 * c.half_width - 1e-12 ||
      c.window.hi > 0.5 * c.half_width + 1e-12)
    fail("window must be a nonempty subset of [-L/2, L/2]");
  if (c.lp.empty()) fail("lp must not be empty");
  for (double p : c.lp)
    if (!(p >= 1.0 && p < 4.0)) fail("lp exponents must lie in [1, 4)");
  if (c.kruzkov_levels.empty() || !(c.kruzkov_delta > 0.0)) fail("kruzkov battery needs levels and delta > 0");
  if (!(c.residual_radius > 0.0)) fail("residual.radius must be positive");
  if (!(c.residual_taper >= 0.0 && c.residual_taper < 0.5)) fail("residual.taper must lie in [0, 0.5)");
  if (!(c.bumps.radius_t_fraction > 0.0 && c.bumps.radius_t_fraction < 0.5))
    fail("bumps.radius_t_fraction must lie in (0, 0.5)");
  if (c.refinement < 4) fail("refinement must be at least 4");
  if (!(c.bound_factor > 0.0)) fail("bound_factor must be positive");
  if (!(c.stepper.cfl > 0.0) || !(c.stepper.stability > 0.0) || !(c.stepper.dt_max > 0.0))
    fail("stepper options must be positive");
  if (c.datum.family == DatumFamily::riemann) {
    const double a = c.datum.left_edge * c.half_width;
    if (!(a >= -c.half_width && a < c.datum.jump && c.datum.jump <= c.half_width))
      fail("riemann datum needs -1 <= left_edge and left_edge * L < jump <= L");
  }
  if (c.datum.family == DatumFamily::gaussian && !(c.datum.sigma > 0.0)) fail("datum.sigma must be positive");
}

inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  validate(cfg);
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in);
}

/// Canonical "key = value" listing of every key, sorted.
inline std::string canonical_text(const ExperimentConfig& c) {
  std::string s;
  for (const auto& [k, h] : detail::config_keys()) s += k + " = " + h.get(c) + "\n";
  return s;
}

/// FNV-1a of the canonical text, excluding the output directory.
inline std::string config_hash(const ExperimentConfig& c) {
  ExperimentConfig copy = c;
  copy.out = "";
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_text(copy)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rkdv
