// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "rkdv/rkdv.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <thread>

using namespace rkdv;

namespace {

constexpr double pi = std::numbers::pi;

// pinned tolerances
constexpr double kOperatorTol = 1e-10;
constexpr double kOperatorSeconds = 1.0;
constexpr double kEnergyTol = 1e-6;
constexpr double kRunSeconds = 30.0;
constexpr double kLinfFactor = 2.0;
constexpr double kShockRate = 0.8;
constexpr double kRarefactionRate = 0.7;
constexpr double kGodunovSeconds = 10.0;
constexpr double kRoundoff = 1e-12;
constexpr double kMinSlope = 0.25;
constexpr double kEntropyFloor = -0.05;
constexpr double kEntropyMonotoneTol = 1e-9;
constexpr double kControlCeiling = -0.01;
constexpr double kIdentityTol = 1e-6;

int failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

bool all_rows_ok(const ConvergenceReport& rep, std::string& why) {
  for (const auto& r : rep.rows)
    if (!r.ok()) {
      why = fmt("eps=%g %s", r.epsilon, r.status.c_str());
      return false;
    }
  return !rep.rows.empty();
}

// ---- 1 --------------------------------------------------------------------

void operators() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  double worst_d = 0, worst_ibp = 0, worst_parseval = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const GridSpec g(10 * pi, 128);
    const int modes = 16;
    std::vector<double> a(modes), b(modes), c(modes), d(modes);
    for (int m = 0; m < modes; ++m) a[m] = nd(rng), b[m] = nd(rng), c[m] = nd(rng), d[m] = nd(rng);
    auto k = [&](int m) { return pi * (m + 1) / g.half_width(); };
    const auto f = Field::from_function(g, [&](double x) {
      double s = 0.2;
      for (int m = 0; m < modes; ++m) s += a[m] * std::cos(k(m) * x) + b[m] * std::sin(k(m) * x);
      return s;
    });
    const auto h = Field::from_function(g, [&](double x) {
      double s = -0.4;
      for (int m = 0; m < modes; ++m) s += c[m] * std::cos(k(m) * x) + d[m] * std::sin(k(m) * x);
      return s;
    });
    for (int order = 1; order <= 4; ++order) {
      const auto df = derivative(f, order);
      double err = 0, scale = 0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.x(j);
        double s = 0;
        for (int m = 0; m < modes; ++m) {
          const double km = k(m), kp = std::pow(km, order);
          // d^n/dx^n of a cos + b sin
          const double ph = order * pi / 2;
          s += kp * (a[m] * std::cos(km * x + ph) + b[m] * std::sin(km * x + ph));
        }
        err = std::max(err, std::abs(df[j] - s));
        scale = std::max(scale, std::abs(s));
      }
      worst_d = std::max(worst_d, err / scale);
    }
    const double lhs = inner(f, derivative(h, 1)), rhs = -inner(derivative(f, 1), h);
    worst_ibp = std::max(worst_ibp, std::abs(lhs - rhs) / (l2_norm(f) * l2_norm(derivative(h, 1))));
    const double direct = inner(f, f), spectral = spectral_l2_squared(to_spectrum(f), g);
    worst_parseval = std::max(worst_parseval, std::abs(direct - spectral) / direct);
  }
  const double secs = seconds_since(t0);
  verdict(1, worst_d <= kOperatorTol && worst_ibp <= kOperatorTol && worst_parseval <= kOperatorTol && secs <= kOperatorSeconds,
          fmt("derivative %.2e, integration by parts %.2e, Parseval %.2e (tol %.0e), %.2fs", worst_d, worst_ibp,
              worst_parseval, kOperatorTol, secs));
}

// ---- 2 --------------------------------------------------------------------

void energy_law() {
  const GridSpec g(10 * pi, 512);
  DatumSpec ds;
  ds.family = DatumFamily::gaussian;
  double worst = 0, slowest = 0;
  bool ok = true;
  std::string why;
  for (double eps : {0.0, 0.1})
    for (double beta : {0.0, 0.1, 1e-4}) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto model = make_preset("rosenau_kdv_reg", beta, eps);
      const auto r = integrate_to(make_state(model, make_datum(ds, g, eps), {}, false), 1.0, 0.01);
      slowest = std::max(slowest, seconds_since(t0));
      if (!r.ok()) {
        ok = false;
        why = fmt(" eps=%g beta=%g failed", eps, beta);
        continue;
      }
      worst = std::max(worst, energy_drift(r.state.ledger, model));
    }
  verdict(2, ok && worst <= kEnergyTol && slowest <= kRunSeconds,
          fmt("max relative drift %.2e over 6 runs (tol %.0e), slowest %.2fs%s", worst, kEnergyTol, slowest, why.c_str()));
}

// ---- 3 --------------------------------------------------------------------

void bbm_ledger(const ConvergenceReport& rep) {
  std::string why;
  bool ok = all_rows_ok(rep, why);
  double drift = 0, ratio = 0;
  for (const auto& r : rep.rows) {
    drift = std::max(drift, r.energy_drift);
    for (const auto& v : r.verdicts) {
      ok = ok && v.bounded;
      for (const auto& t : v.terms) ratio = std::max(ratio, v.c0 > 0 ? t.sup / v.c0 : 0.0);
    }
  }
  verdict(3, ok && drift <= kEnergyTol,
          fmt("bbm_reg sweep: energy drift %.2e (tol %.0e), max sup/C0 %.3f (bound 10)%s", drift, kEnergyTol, ratio,
              why.empty() ? "" : (" " + why).c_str()));
}

// ---- 4 --------------------------------------------------------------------

void linf_scaling(const ConvergenceReport& rep) {
  std::string why;
  bool ok = all_rows_ok(rep, why);
  std::vector<double> s;
  for (const auto& r : rep.rows) s.push_back(r.linf_scaled);
  const double first = s.front(), mx = *std::max_element(s.begin(), s.end()), mn = *std::min_element(s.begin(), s.end());
  bool increasing = s.size() > 1;
  for (std::size_t i = 1; i < s.size(); ++i) increasing = increasing && s[i] > s[i - 1];
  const bool grows = increasing && s.back() >= kLinfFactor * s.front();
  std::string series;
  for (double v : s) series += fmt(" %.4g", v);
  verdict(4, ok && mx / first < kLinfFactor && !grows,
          fmt("beta^1/4 sup|u| =%s; max/first %.3f (< %g), max/min %.3f, growing: %s", series.c_str(), mx / first,
              kLinfFactor, mx / mn, grows ? "yes" : "no"));
}

// ---- 5 --------------------------------------------------------------------

void ledger_families(const ConvergenceReport& rep) {
  std::string why;
  bool ok = all_rows_ok(rep, why);
  double ratio = 0, l4_drift = 0;
  std::string worst;
  for (const auto& r : rep.rows)
    for (const auto& v : r.verdicts) {
      ok = ok && v.bounded;
      if (!v.bounded) why = fmt("eps=%g %s unbounded", r.epsilon, to_string(v.family).c_str());
      for (const auto& t : v.terms)
        if (v.c0 > 0 && t.sup / v.c0 > ratio) ratio = t.sup / v.c0, worst = to_string(v.family);
      if (v.family == LedgerFamily::l4) l4_drift = std::max(l4_drift, std::abs(v.drift));
    }
  verdict(5, ok, fmt("max sup/C0 %.3f (%s, bound 10), L4 drift %.3e%s", ratio, worst.c_str(), l4_drift,
                     why.empty() ? "" : (", " + why).c_str()));
}

// ---- 6 --------------------------------------------------------------------

double fit_log_slope(const std::vector<double>& h, const std::vector<double>& e) { return estimate_rate(h, e).slope; }

void godunov() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> h, es, er;
  double shock_err = 0, shock_dx_ratio = 0;
  bool tvd = true, maxp = true;
  for (std::size_t m : {1024u, 2048u, 4096u}) {
    for (int kind = 0; kind < 2; ++kind) {
      const double uL = kind == 0 ? 1.0 : 0.0, uR = kind == 0 ? 0.0 : 1.0;
      auto g = kind == 0 ? plateau_cells(2.0, m, 1.0, 0.0, -1.5, 0.0, FluxConvention::square)
                         : plateau_cells(2.0, m, 1.0, 0.0, 0.0, 1.5, FluxConvention::square);
      const double lo = *std::min_element(g.values().begin(), g.values().end());
      const double hi = *std::max_element(g.values().begin(), g.values().end());
      double tv = total_variation(g.values());
      while (g.time() < 0.5) {
        const double dt = std::min(0.9 * g.dx() / max_wave_speed(g), 0.5 - g.time());
        g = godunov_step(g, dt);
        const double tv1 = total_variation(g.values());
        tvd = tvd && tv1 <= tv + kRoundoff;
        tv = tv1;
        for (double v : g.values()) maxp = maxp && v >= lo && v <= hi;
      }
      const double wlo = kind == 0 ? -0.25 : -1.0, whi = kind == 0 ? 1.25 : 1.5;
      double l1 = 0, mass = 0;
      for (std::size_t i = 0; i < g.cells(); ++i) {
        const double x = g.center(i);
        if (x < wlo || x > whi) continue;
        l1 += g.dx() * std::abs(g[i] - riemann_exact(uL, uR, g.flux(), g.time(), x));
        mass += g.dx() * g[i];
      }
      if (kind == 0) {
        es.push_back(l1);
        h.push_back(g.dx());
        const double pos = wlo + mass;  // exact shock at x = 0.5
        shock_err = std::max(shock_err, std::abs(pos - 0.5));
        shock_dx_ratio = std::max(shock_dx_ratio, std::abs(pos - 0.5) / g.dx());
      } else {
        er.push_back(l1);
      }
    }
  }
  const double rs = fit_log_slope(h, es), rr = fit_log_slope(h, er), secs = seconds_since(t0);
  verdict(6, rs >= kShockRate && rr >= kRarefactionRate && shock_dx_ratio <= 2.0 && tvd && maxp && secs <= kGodunovSeconds,
          fmt("shock rate %.3f (>= %g), rarefaction rate %.3f (>= %g), shock position error %.2e = %.2f dx (<= 2), "
              "TVD %s, max principle %s, %.2fs",
              rs, kShockRate, rr, kRarefactionRate, shock_err, shock_dx_ratio, tvd ? "yes" : "no", maxp ? "yes" : "no",
              secs));
}

// ---- 7 --------------------------------------------------------------------

void singular_limit(const ConvergenceReport& rep) {
  std::string why;
  bool ok = all_rows_ok(rep, why);
  std::string detail;
  for (const auto& [p, fit] : rep.rates) {
    const bool strict = distance_verdict(rep, p) == SweepVerdict::pass;
    ok = ok && strict && fit.fitted && fit.slope > kMinSlope;
    detail += fmt("p=%g:", p);
    for (const auto& r : rep.rows) detail += fmt(" %.4g", r.distance.at(p));
    detail += fmt(" slope %.3f%s; ", fit.slope, strict ? "" : " NOT strictly decreasing");
  }
  verdict(7, ok && rep.rows.size() == 4, detail + fmt("slope floor %g", kMinSlope) + why);
}

// ---- 8 --------------------------------------------------------------------

void entropy_selection(const ConvergenceReport& rep, const ExperimentConfig& cfg) {
  std::string why;
  bool ok = all_rows_ok(rep, why);
  std::vector<double> e;
  for (const auto& r : rep.rows) e.push_back(r.entropy_min);
  bool increasing = true;
  for (std::size_t i = 1; i < e.size(); ++i) increasing = increasing && e[i] >= e[i - 1] - kEntropyMonotoneTol;

  // steady expansion shock, -1 | +1, glued at the bump centre nearest the origin
  const auto bumps = make_bumps(cfg.window, cfg.final_time, cfg.bumps);
  double x_jump = bumps.front().xc;
  for (const auto& b : bumps)
    if (std::abs(b.xc) < std::abs(x_jump)) x_jump = b.xc;
  const GridSpec grid(cfg.half_width, cfg.points);
  SpaceTimeSamples control{grid.x(0), grid.dx(), sample_times(cfg), {}};
  std::vector<double> row(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) row[j] = grid.x(j) < x_jump ? -1.0 : 1.0;
  control.values.assign(control.times.size(), row);
  const auto tests = as_test_functions(bumps);
  double control_min = std::numeric_limits<double>::infinity();
  for (const auto& pair : kruzkov_battery(cfg))
    for (double v : weak_entropy_residual(control, pair, tests, cfg.window)) control_min = std::min(control_min, v);

  std::string series;
  for (double v : e) series += fmt(" %.3e", v);
  verdict(8, ok && e.back() >= kEntropyFloor && increasing && control_min <= kControlCeiling,
          fmt("p=5 entropy minima%s (final >= %g, increasing: %s); expansion-shock control at x=%.3f %.3e (<= %g)",
              series.c_str(), kEntropyFloor, increasing ? "yes" : "no", x_jump, control_min, kControlCeiling));
}

// ---- 9 --------------------------------------------------------------------

void residual_decomposition_check(const ConvergenceReport& p5, const std::vector<const ConvergenceReport*>& all) {
  std::string why;
  bool ok = all_rows_ok(p5, why);
  double identity = 0;
  for (const auto* rep : all)
    for (const auto& r : rep->rows)
      if (r.ok()) identity = std::max({identity, r.residual.identity_weak, r.residual.identity_pointwise});
  std::string detail = fmt("identity %.2e (tol %.0e);", identity, kIdentityTol);
  ok = ok && identity <= kIdentityTol;
  for (std::size_t k : {0u, 2u, 4u, 3u, 5u}) {
    bool dec = true;
    detail += fmt(" I%zu %s:", k + 1, ResidualReport::divergence_term(k) ? "H-1" : "L1");
    for (std::size_t i = 0; i < p5.rows.size(); ++i) {
      detail += fmt(" %.3g", p5.rows[i].residual_norm(k));
      if (i > 0) dec = dec && p5.rows[i].residual_norm(k) < p5.rows[i - 1].residual_norm(k);
    }
    detail += dec ? ";" : " (not decreasing);";
    ok = ok && dec;
  }
  double i2_ratio = 0;
  for (const auto& r : p5.rows) {
    double c0 = 0;
    for (const auto& d : r.datum) c0 = std::max(c0, d.c0);
    i2_ratio = std::max(i2_ratio, r.residual_norm(1) / c0);
  }
  ok = ok && i2_ratio <= 10.0;
  verdict(9, ok, detail + fmt(" max I2/C0 %.3g (<= 10)", i2_ratio));
}

// ---- 10 -------------------------------------------------------------------

void determinism(const ConvergenceReport& first, const ExperimentConfig& cfg) {
  const auto again = run_sweep(cfg, 1);
  const auto csv = to_csv(first);
  const bool same_csv = to_csv(again) == csv;
  const auto parsed = report_from_csv(csv);
  const auto via_json = report_from_json(nlohmann::json::parse(to_json(parsed).dump()));
  const bool csv_round = to_csv(via_json) == csv;
  const auto full = report_from_json(nlohmann::json::parse(to_json(first).dump()));
  bool json_round = full.rows.size() == first.rows.size() && full.config_hash == first.config_hash;
  for (std::size_t i = 0; json_round && i < first.rows.size(); ++i) {
    const auto &a = first.rows[i], &b = full.rows[i];
    json_round = a.epsilon == b.epsilon && a.beta == b.beta && a.distance == b.distance &&
                 a.spacetime_distance == b.spacetime_distance && a.entropy_min == b.entropy_min &&
                 a.residual.l1 == b.residual.l1 && a.linf_scaled == b.linf_scaled && a.ledger_ok == b.ledger_ok;
  }
  verdict(10, same_csv && csv_round && json_round,
          fmt("repeat sweep (workers %zu then 1) CSV identical: %s; CSV->JSON->CSV identical: %s; JSON fields equal: %s",
              workers(), same_csv ? "yes" : "no", csv_round ? "yes" : "no", json_round ? "yes" : "no"));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    operators();
    energy_law();
    godunov();

    const ExperimentConfig base;
    const auto p4 = run_sweep(base, workers());
    std::printf("default sweep: %.1fs\n", p4.wall_seconds);

    auto cfg5 = base;
    cfg5.scaling_exponent = 5.0;
    const auto p5 = run_sweep(cfg5, workers());
    std::printf("p=5 sweep: %.1fs\n", p5.wall_seconds);

    auto cfgb = base;
    cfgb.preset = "bbm_reg";
    const auto bbm = run_sweep(cfgb, workers());
    std::printf("bbm_reg sweep: %.1fs\n", bbm.wall_seconds);

    bbm_ledger(bbm);
    linf_scaling(p4);
    ledger_families(p4);
    singular_limit(p4);
    entropy_selection(p5, cfg5);
    residual_decomposition_check(p5, {&p4, &p5, &bbm});
    determinism(p4, base);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d failing criteria, %.1fs\n", failures ? "FAIL" : "PASS", failures, seconds_since(t0));
  return failures ? 1 : 0;
}
