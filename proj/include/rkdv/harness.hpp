#pragma once

// Sweeps along a scaling path beta = C eps^p: one spectral run per eps, a
// shared Godunov reference, per-row diagnostics and fitted rates.

#include "rkdv/analysis.hpp"
#include "rkdv/burgers.hpp"
#include "rkdv/config.hpp"
#include "rkdv/datum.hpp"
#include "rkdv/entropy.hpp"
#include "rkdv/run_store.hpp"
#include "rkdv/timestepper.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace rkdv {

inline constexpr const char* kVersion = "0.1.0";

// ---- rates ------------------------------------------------------------------

struct RateFit {
  bool fitted = false;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();  // rms of log residuals
  std::size_t used = 0;
};

/// Least-squares slope of log(distance) against log(eps). Rows with
/// non-finite or nonpositive entries are skipped; fewer than 3 survivors
/// give an unfitted result.
inline RateFit estimate_rate(const std::vector<double>& eps, const std::vector<double>& distance) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size() && i < distance.size(); ++i)
    if (eps[i] > 0.0 && distance[i] > 0.0 && std::isfinite(eps[i]) && std::isfinite(distance[i])) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(distance[i]));
    }
  RateFit r;
  r.used = lx.size();
  if (lx.size() < 3) return r;
  const double n = double(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / n, my += ly[i] / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) return r;
  r.fitted = true;
  r.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (my + r.slope * (lx[i] - mx));
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  return r;
}

// ---- rows and reports -------------------------------------------------------

struct RowResult {
  double epsilon = 0.0;
  double beta = 0.0;
  std::string status = "ok";
  std::map<double, double> distance;            // p -> L^p(W) distance at T
  std::map<double, double> spacetime_distance;  // p -> L^p(W x [0, T]) distance
  std::vector<DatumReport> datum;
  std::vector<FamilyVerdict> verdicts;
  bool ledger_ok = false;
  double linf_scaled = std::numeric_limits<double>::quiet_NaN();
  double energy_drift = std::numeric_limits<double>::quiet_NaN();
  ResidualReport residual;
  std::map<double, double> entropy_min_by_level;
  double entropy_min = std::numeric_limits<double>::quiet_NaN();
  std::size_t steps = 0;
  double wall_seconds = 0.0;

  bool ok() const { return status == "ok"; }

  /// Residual term k: H^-1 norm for divergence terms, L^1 otherwise.
  double residual_norm(std::size_t k) const {
    return ResidualReport::divergence_term(k) ? residual.hminus1[k] : residual.l1[k];
  }
};

enum class SweepVerdict { pass, weak_pass, fail };

inline std::string to_string(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::pass: return "pass";
    case SweepVerdict::weak_pass: return "weak pass";
    case SweepVerdict::fail: return "fail";
  }
  return "?";
}

struct ConvergenceReport {
  std::string config_hash;
  std::string version = kVersion;
  std::string preset;
  double scaling_exponent = 0.0;
  std::vector<RowResult> rows;
  std::map<double, RateFit> rates;
  double wall_seconds = 0.0;
};

// ---- reference --------------------------------------------------------------

/// Godunov reference resampled onto the spectral grid at every sample time.
struct Reference {
  GridSpec grid{1.0, 16};
  std::vector<double> times;
  std::vector<Field> fields;

  const Field& final() const { return fields.back(); }
};

inline std::vector<double> sample_times(const ExperimentConfig& cfg) {
  const auto n = static_cast<std::size_t>(std::llround(cfg.final_time / cfg.sample_every));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = i == n ? cfg.final_time : cfg.sample_every * double(i);
  return t;
}

inline FluxConvention preset_flux(const std::string& preset) { return make_preset(preset, 0.0, 0.0).flux; }

inline Reference build_reference(const ExperimentConfig& cfg) {
  Reference r;
  r.grid = GridSpec(cfg.half_width, cfg.points);
  r.times = sample_times(cfg);
  const auto g0 = reference_datum(cfg.datum, cfg.half_width, cfg.reference_cells(), preset_flux(cfg.preset));
  r.fields.push_back(resample_to(g0, r.grid));
  const std::vector<double> later(r.times.begin() + 1, r.times.end());
  for (const auto& g : evolve(g0, cfg.final_time, later)) r.fields.push_back(resample_to(g, r.grid));
  return r;
}

// ---- single run -------------------------------------------------------------

inline std::vector<LedgerFamily> families_for(const std::string& preset) {
  const bool bbm = preset_flux(preset) == FluxConvention::half_square;
  std::vector<LedgerFamily> out;
  for (auto f : kAllFamilies)
    if (is_bbm_family(f) == bbm) out.push_back(f);
  return out;
}

/// max_t |Q(t) - Q(0)| / Q(0) for Q = |u|^2 - b2 |ux|^2 + c |uxx|^2 + 2 eps int |ux|^2.
inline double energy_drift(const NormLedger& L, const ModelSpec& m) {
  if (L.empty()) return 0.0;
  const auto& u = L.get(series::u_l2sq);
  const auto& ux = L.get(series::ux_l2sq);
  const auto& uxx = L.get(series::uxx_l2sq);
  const auto& iux = L.get(series::integral_name(series::ux_l2sq));
  auto q = [&](std::size_t i) {
    return u[i] - m.mixed_dispersion * ux[i] + m.higher_mixed * uxx[i] + 2 * m.epsilon * iux[i];
  };
  const double q0 = q(0);
  double d = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) d = std::max(d, std::abs(q(i) - q0));
  return q0 > 0.0 ? d / q0 : d;
}

inline std::vector<EntropyPair> kruzkov_battery(const ExperimentConfig& cfg) {
  std::vector<EntropyPair> out;
  for (double c : cfg.kruzkov_levels) out.push_back(kruzkov_smoothed(c, cfg.kruzkov_delta, preset_flux(cfg.preset)));
  return out;
}

/// Diagnostics of a finished run against the shared reference.
inline void diagnose(const ExperimentConfig& cfg, const SpaceTimeRun& run, const NormLedger& ledger,
                     const Field& u0, const Reference& ref, const std::vector<EntropyPair>& kruzkov, RowResult& row) {
  const double eps = row.epsilon, beta = row.beta;
  for (auto c : {DatumCondition::smooth_h3, DatumCondition::smooth_h4, DatumCondition::bbm})
    row.datum.push_back(initial_datum_conditions(u0, eps, beta, c));
  auto c0_of = [&](DatumCondition c) {
    for (const auto& d : row.datum)
      if (d.condition == c) return d.c0;
    return 0.0;
  };

  row.ledger_ok = true;
  for (auto f : families_for(cfg.preset)) {
    row.verdicts.push_back(ledger_bounds_check(ledger, eps, beta, f, c0_of(condition_for(f)), cfg.bound_factor));
    row.ledger_ok = row.ledger_ok && row.verdicts.back().bounded;
  }
  row.linf_scaled = linf_scaled(ledger, beta);
  row.energy_drift = energy_drift(ledger, run.model);

  const auto samples = samples_of(run);
  if (ref.times.size() != samples.times.size())
    throw std::runtime_error("reference and run sample counts differ");
  for (std::size_t i = 0; i < ref.times.size(); ++i)
    if (std::abs(ref.times[i] - samples.times[i]) > 1e-9) throw std::runtime_error("reference and run sample times differ");
  SpaceTimeSamples refs{samples.x0, samples.dx, samples.times, {}};
  for (const auto& f : ref.fields) refs.values.emplace_back(f.values().begin(), f.values().end());
  for (double p : cfg.lp) {
    row.distance[p] = lp_loc_distance(run.u.back(), ref.final(), p, cfg.window);
    row.spacetime_distance[p] = lp_loc_distance(samples, refs, p, cfg.window);
  }

  const auto bumps = make_bumps(cfg.window, cfg.final_time, cfg.bumps);
  const auto tests = as_test_functions(bumps);
  row.entropy_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kruzkov.size(); ++i) {
    const auto e = weak_entropy_residual(samples, kruzkov[i], tests, cfg.window);
    const double m = e.empty() ? 0.0 : *std::min_element(e.begin(), e.end());
    row.entropy_min_by_level[cfg.kruzkov_levels[i]] = m;
    row.entropy_min = std::min(row.entropy_min, m);
  }

  const auto pair = compact_bump(cfg.residual_center, cfg.residual_radius, run.model.flux);
  row.residual = residual_decomposition(run, pair, {cfg.window, cfg.residual_taper}, bumps);
}

inline std::string row_directory_name(std::size_t index, double eps) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, eps);
  return "row" + std::to_string(index) + "_eps" + std::string(buf, r.ptr);
}

inline nlohmann::json ledger_to_json(const NormLedger& L) {
  nlohmann::json s = nlohmann::json::object();
  for (const auto& [name, v] : L.all()) s[name] = v;
  return {{"times", L.times()}, {"series", s}};
}

inline NormLedger ledger_from_json(const nlohmann::json& j) {
  NormLedger L;
  const auto times = j.at("times").get<std::vector<double>>();
  std::map<std::string, std::vector<double>> series;
  for (const auto& [name, v] : j.at("series").items()) series[name] = v.get<std::vector<double>>();
  for (std::size_t i = 0; i < times.size(); ++i) {
    NormValues values;
    for (const auto& [name, v] : series) values[name] = v.at(i);
    L.append(times[i], values, {});
  }
  return L;
}

/// Integrates one (eps, beta) row and evaluates it. Solver failures become a
/// failed row; nothing escapes except programming errors in the caller.
inline RowResult run_single(const ExperimentConfig& cfg, double eps, double beta, const Reference& ref,
                            const std::vector<EntropyPair>& kruzkov, std::size_t index = 0) {
  const auto start = std::chrono::steady_clock::now();
  RowResult row;
  row.epsilon = eps;
  row.beta = beta;
  try {
    const GridSpec grid(cfg.half_width, cfg.points);
    const auto model = make_preset(cfg.preset, beta, eps);
    const auto u0 = make_datum(cfg.datum, grid, eps);
    auto result = integrate_to(make_state(model, u0, cfg.stepper, true), cfg.final_time, cfg.sample_every);
    row.steps = result.state.step_count;
    if (!result.ok()) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "failed: %s at t=%.6g dt=%.3g", result.failure->reason.c_str(),
                    result.failure->t, result.failure->dt);
      row.status = buf;
    } else {
      diagnose(cfg, result.state.trajectory, result.state.ledger, u0, ref, kruzkov, row);
      if (cfg.store_runs) {
        const auto dir = cfg.out / "runs" / row_directory_name(index, eps);
        save_run(dir, result.state.trajectory);
        detail::write_json(dir / "ledger.json", ledger_to_json(result.state.ledger));
      }
    }
  } catch (const std::exception& e) {
    row.status = std::string("failed: ") + e.what();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

inline void fit_rates(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  for (double p : cfg.lp) {
    std::vector<double> e, d;
    for (const auto& r : rep.rows)
      if (r.ok()) {
        e.push_back(r.epsilon);
        d.push_back(r.distance.at(p));
      }
    rep.rates[p] = estimate_rate(e, d);
  }
}

/// Runs every eps of the configuration on up to `workers` threads.
inline ConvergenceReport run_sweep(const ExperimentConfig& cfg, std::size_t workers = 1) {
  validate(cfg);
  if (cfg.epsilons.size() < 3) throw ConfigError("invalid config: a sweep needs at least 3 epsilons");
  const auto start = std::chrono::steady_clock::now();
  ConvergenceReport rep;
  rep.config_hash = config_hash(cfg);
  rep.preset = cfg.preset;
  rep.scaling_exponent = cfg.scaling_exponent;
  const auto ref = build_reference(cfg);
  const auto kruzkov = kruzkov_battery(cfg);
  const auto path = cfg.path();
  rep.rows.resize(cfg.epsilons.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cfg.epsilons.size(); i = next++) {
      const double eps = cfg.epsilons[i];
      rep.rows[i] = run_single(cfg, eps, path.beta(eps), ref, kruzkov, i);
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, cfg.epsilons.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  fit_rates(cfg, rep);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// Re-evaluates runs stored by a sweep with store_runs = true.
inline ConvergenceReport analyze_stored(const ExperimentConfig& cfg) {
  const auto root = cfg.out / "runs";
  if (!std::filesystem::is_directory(root)) throw std::runtime_error("no stored runs under " + root.string());
  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(root))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  ConvergenceReport rep;
  rep.config_hash = config_hash(cfg);
  rep.preset = cfg.preset;
  rep.scaling_exponent = cfg.scaling_exponent;
  const auto ref = build_reference(cfg);
  const auto kruzkov = kruzkov_battery(cfg);
  for (const auto& dir : dirs) {
    const auto run = load_run(dir);
    const auto ledger = ledger_from_json(detail::read_json(dir / "ledger.json"));
    RowResult row;
    row.epsilon = run.model.epsilon;
    row.beta = run.model.beta;
    diagnose(cfg, run, ledger, make_datum(cfg.datum, run.grid, row.epsilon), ref, kruzkov, row);
    rep.rows.push_back(std::move(row));
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const RowResult& a, const RowResult& b) { return a.epsilon > b.epsilon; });
  fit_rates(cfg, rep);
  return rep;
}

// ---- verdicts ---------------------------------------------------------------

/// Strictly decreasing distances with a positive slope pass; an overall
/// decrease (last < first, positive slope) is a weak pass.
inline SweepVerdict distance_verdict(const ConvergenceReport& rep, double p) {
  std::vector<double> d;
  for (const auto& r : rep.rows) {
    if (!r.ok()) return SweepVerdict::fail;
    d.push_back(r.distance.at(p));
  }
  const auto it = rep.rates.find(p);
  if (d.size() < 3 || it == rep.rates.end() || !it->second.fitted || !(it->second.slope > 0.0))
    return SweepVerdict::fail;
  bool strict = true;
  for (std::size_t i = 1; i < d.size(); ++i) strict = strict && d[i] < d[i - 1];
  if (strict) return SweepVerdict::pass;
  return d.back() < d.front() ? SweepVerdict::weak_pass : SweepVerdict::fail;
}

/// True when every row succeeded with bounded ledgers and every exponent
/// passes at least weakly.
inline bool sweep_passes(const ConvergenceReport& rep) {
  if (rep.rows.empty()) return false;
  for (const auto& r : rep.rows)
    if (!r.ok() || !r.ledger_ok) return false;
  for (const auto& [p, fit] : rep.rates)
    if (distance_verdict(rep, p) == SweepVerdict::fail) return false;
  return true;
}

}  // namespace rkdv
