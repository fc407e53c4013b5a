#pragma once

// Diagnostics on computed runs: scaled ledger bounds, the entropy residual
// split into its diffusive / dispersive pieces, weak entropy inequalities
// against bump test functions, and windowed L^p distances.

#include "rkdv/datum.hpp"
#include "rkdv/entropy.hpp"
#include "rkdv/ledger.hpp"
#include "rkdv/models.hpp"
#include "rkdv/run_store.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rkdv {

// ---- sampling and windows ---------------------------------------------------

struct Window {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double a, double b) const { return a >= lo && b <= hi; }
};

/// Values u(t_n, x0 + j dx), j = 0..nx-1.
struct SpaceTimeSamples {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  std::size_t nx() const { return values.empty() ? 0 : values.front().size(); }
  double x(std::size_t j) const { return x0 + static_cast<double>(j) * dx; }
};

inline SpaceTimeSamples samples_of(const SpaceTimeRun& run) {
  SpaceTimeSamples s{run.grid.x(0), run.grid.dx(), run.times, {}};
  for (const auto& f : run.u) s.values.emplace_back(f.values().begin(), f.values().end());
  return s;
}

/// Length of [x_j - dx/2, x_j + dx/2] inside the window, per node.
inline std::vector<double> window_weights(double x0, double dx, std::size_t n, const Window& w) {
  if (!(w.hi > w.lo)) throw std::invalid_argument("window must have positive length");
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = x0 + static_cast<double>(j) * dx;
    out[j] = std::max(0.0, std::min(c + 0.5 * dx, w.hi) - std::max(c - 0.5 * dx, w.lo));
  }
  return out;
}

inline std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t n = 0; n + 1 < t.size(); ++n) {
    const double h = 0.5 * (t[n + 1] - t[n]);
    w[n] += h;
    w[n + 1] += h;
  }
  return w;
}

// ---- L^p_loc distances ------------------------------------------------------

inline void require_lp_range(double p) {
  if (!(p >= 1.0 && p < 4.0)) throw std::invalid_argument("lp_loc_distance: p must lie in [1, 4)");
}

/// (int_W |u - v|^p dx)^{1/p} for two sample arrays on the same nodes.
inline double lp_loc_distance(std::span<const double> u, std::span<const double> v, double x0, double dx, double p,
                              const Window& w) {
  require_lp_range(p);
  if (u.size() != v.size()) throw std::invalid_argument("lp_loc_distance: size mismatch");
  const auto wt = window_weights(x0, dx, u.size(), w);
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    if (wt[j] > 0.0) s += wt[j] * std::pow(std::abs(u[j] - v[j]), p);
  return std::pow(s, 1.0 / p);
}

inline double lp_loc_distance(const Field& u, const Field& v, double p, const Window& w) {
  require_same_grid(u, v, "lp_loc_distance");
  return lp_loc_distance(u.values(), v.values(), u.grid().x(0), u.grid().dx(), p, w);
}

/// Space-time version over W x [t_0, t_last], trapezoid rule in t.
inline double lp_loc_distance(const SpaceTimeSamples& u, const SpaceTimeSamples& v, double p, const Window& w) {
  require_lp_range(p);
  if (u.times != v.times || u.nx() != v.nx() || u.x0 != v.x0 || u.dx != v.dx)
    throw std::invalid_argument("lp_loc_distance: sampling mismatch");
  const auto wt = window_weights(u.x0, u.dx, u.nx(), w);
  const auto tw = trapezoid_weights(u.times);
  double s = 0.0;
  for (std::size_t n = 0; n < u.times.size(); ++n) {
    double row = 0.0;
    for (std::size_t j = 0; j < u.nx(); ++j)
      if (wt[j] > 0.0) row += wt[j] * std::pow(std::abs(u.values[n][j] - v.values[n][j]), p);
    s += tw[n] * row;
  }
  return std::pow(s, 1.0 / p);
}

// ---- test functions ---------------------------------------------------------

struct TestFunction {
  std::function<double(double, double)> phi;    // (t, x)
  std::function<double(double, double)> phi_t;
  std::function<double(double, double)> phi_x;
  double x_lo, x_hi, t_lo, t_hi;                // support box
};

namespace detail {
inline double bump1(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }
inline double dbump1(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  return bump1(s) * (-2.0 * s / (w * w));
}
inline double bump1_mass() {
  static const double m = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bump1, -1.0, 1.0, 15, 1e-15);
  return m;
}
}  // namespace detail

/// Product bump centred at (tc, xc) with radii (rt, rx), unit space-time mass.
struct Bump {
  double xc = 0.0, rx = 1.0, tc = 0.5, rt = 0.25;

  TestFunction as_test_function() const {
    const double z = 1.0 / (detail::bump1_mass() * detail::bump1_mass() * rx * rt);
    const Bump b = *this;
    return TestFunction{
        [b, z](double t, double x) { return z * detail::bump1((x - b.xc) / b.rx) * detail::bump1((t - b.tc) / b.rt); },
        [b, z](double t, double x) {
          return z * detail::bump1((x - b.xc) / b.rx) * detail::dbump1((t - b.tc) / b.rt) / b.rt;
        },
        [b, z](double t, double x) {
          return z * detail::dbump1((x - b.xc) / b.rx) / b.rx * detail::bump1((t - b.tc) / b.rt);
        },
        xc - rx, xc + rx, tc - rt, tc + rt};
  }
};

struct BumpBattery {
  std::size_t per_axis_x = 6;
  std::size_t per_axis_t = 3;
  std::vector<double> radii_x{0.5, 2.0};
  double radius_t_fraction = 0.2;  // rt = fraction * T
  std::size_t random_extra = 0;
  std::uint64_t seed = 1;
};

/// Regular lattice of bumps inside W x (0, T) plus optional seeded random ones.
inline std::vector<Bump> make_bumps(const Window& w, double T, const BumpBattery& cfg) {
  std::vector<Bump> out;
  const double rt = cfg.radius_t_fraction * T;
  if (!(rt > 0.0) || 2.0 * rt >= T) throw std::invalid_argument("make_bumps: time radius must lie in (0, T/2)");
  for (double rx : cfg.radii_x) {
    if (2.0 * rx >= w.length()) continue;
    for (std::size_t i = 0; i < cfg.per_axis_x; ++i) {
      const double xc = cfg.per_axis_x == 1 ? 0.5 * (w.lo + w.hi)
                                            : w.lo + rx + (w.length() - 2 * rx) * double(i) / double(cfg.per_axis_x - 1);
      for (std::size_t n = 0; n < cfg.per_axis_t; ++n) {
        const double tc = cfg.per_axis_t == 1 ? 0.5 * T : rt + (T - 2 * rt) * double(n + 1) / double(cfg.per_axis_t + 1);
        out.push_back({xc, rx, tc, rt});
      }
    }
  }
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.random_extra; ++i) {
    std::uniform_real_distribution<double> rxd(0.25, std::min(2.0, 0.25 * w.length()));
    const double rx = rxd(rng);
    std::uniform_real_distribution<double> xd(w.lo + rx, w.hi - rx);
    std::uniform_real_distribution<double> rtd(0.05 * T, 0.45 * T);
    const double rti = rtd(rng);
    std::uniform_real_distribution<double> td(rti, T - rti);
    const double xc = xd(rng);
    const double tc = td(rng);
    out.push_back({xc, rx, tc, rti});
  }
  return out;
}

namespace detail {

inline void require_inside(const TestFunction& phi, const SpaceTimeSamples& s, const Window& w) {
  if (s.times.size() < 2) throw std::invalid_argument("test function integration needs at least 2 time samples");
  if (!w.contains(phi.x_lo, phi.x_hi) || phi.t_lo < s.times.front() || phi.t_hi > s.times.back())
    throw std::invalid_argument("test function support leaves the window");
}

/// Rectangle rule in x, trapezoid in t, of sum_k g_k(n, j) * test_k(t, x).
template <class Integrand>
double space_time_quadrature(const SpaceTimeSamples& s, const TestFunction& phi, Integrand&& g) {
  const auto tw = trapezoid_weights(s.times);
  double total = 0.0;
  for (std::size_t n = 0; n < s.times.size(); ++n) {
    const double t = s.times[n];
    if (t <= phi.t_lo || t >= phi.t_hi) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < s.nx(); ++j) {
      const double x = s.x(j);
      if (x <= phi.x_lo || x >= phi.x_hi) continue;
      row += g(n, j, t, x);
    }
    total += tw[n] * s.dx * row;
  }
  return total;
}

}  // namespace detail

// ---- weak entropy residual --------------------------------------------------

/// E(phi) = int int eta(u) phi_t + q(u) phi_x per test function. E >= 0 is
/// the entropy inequality eta_t + q_x <= 0 tested against phi.
/// The derivatives of phi enter as differences across the dual cells
/// [t_{n-1/2}, t_{n+1/2}] x [x_j - dx/2, x_j + dx/2], so constant states give
/// exactly zero.
inline std::vector<double> weak_entropy_residual(const SpaceTimeSamples& s, const EntropyPair& pair,
                                                 const std::vector<TestFunction>& tests, const Window& w) {
  if (!pair.convex()) throw std::invalid_argument("weak_entropy_residual: entropy '" + pair.name() + "' is not convex");
  const std::size_t nt = s.times.size();
  std::vector<double> out;
  out.reserve(tests.size());
  for (const auto& phi : tests) {
    detail::require_inside(phi, s, w);
    const double h = 0.5 * s.dx;
    double e = 0.0;
    for (std::size_t n = 0; n < nt; ++n) {
      const double t = s.times[n];
      const double tm = n > 0 ? 0.5 * (s.times[n - 1] + t) : t;
      const double tp = n + 1 < nt ? 0.5 * (t + s.times[n + 1]) : t;
      if (tp <= phi.t_lo || tm >= phi.t_hi) continue;
      for (std::size_t j = 0; j < s.nx(); ++j) {
        const double x = s.x(j);
        if (x + h <= phi.x_lo || x - h >= phi.x_hi) continue;
        if (phi.phi(t, x) < 0.0) throw std::invalid_argument("weak_entropy_residual: negative test function");
        const double u = s.values[n][j];
        e += pair.eta(u) * (phi.phi(tp, x) - phi.phi(tm, x)) * s.dx +
             pair.q(u) * (phi.phi(t, x + h) - phi.phi(t, x - h)) * (tp - tm);
      }
    }
    out.push_back(e);
  }
  return out;
}

inline std::vector<TestFunction> as_test_functions(const std::vector<Bump>& bumps) {
  std::vector<TestFunction> t;
  for (const auto& b : bumps) t.push_back(b.as_test_function());
  return t;
}

// ---- residual decomposition -------------------------------------------------

inline constexpr std::size_t kResidualTerms = 6;

struct ResidualReport {
  double epsilon = 0.0;
  double beta = 0.0;
  std::string pair;
  std::array<double, kResidualTerms> hminus1{};  // divergence terms 1, 3, 5; NaN elsewhere
  std::array<double, kResidualTerms> l1{};
  double identity_weak = 0.0;       // max_phi |<eta_t + q_x - sum I, phi>| / scale
  double identity_pointwise = 0.0;  // max |eta_t + q_x - sum I| / max(|eta_t + q_x| + sum |I|)

  static bool divergence_term(std::size_t i) { return i % 2 == 0; }
};

struct ResidualOptions {
  Window window{-1.0, 1.0};
  double taper = 0.1;  // Tukey taper fraction on each side, in x and in t
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline double tukey(double s, double alpha) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  if (alpha <= 0.0) return 1.0;
  if (s < alpha) return 0.5 * (1.0 - std::cos(std::numbers::pi * s / alpha));
  if (s > 1.0 - alpha) return 0.5 * (1.0 - std::cos(std::numbers::pi * (1.0 - s) / alpha));
  return 1.0;
}

/// Norm of d_x(chi g) in H^{-1}(R^2) with multiplier (1 + k^2 + w^2)^{-1/2},
/// chi a Tukey window on the node block, zero padded to twice its size.
inline double hminus1_of_divergence(const std::vector<std::vector<double>>& g, double dx, double dt, double taper) {
  const std::size_t nt = g.size();
  const std::size_t nx = nt == 0 ? 0 : g.front().size();
  if (nt < 2 || nx < 2) return 0.0;
  const std::size_t pt = next_pow2(2 * nt), px = next_pow2(2 * nx);
  std::vector<double> a(pt * px, 0.0);
  for (std::size_t n = 0; n < nt; ++n) {
    const double ct = tukey((double(n) + 0.5) / double(nt), taper);
    for (std::size_t j = 0; j < nx; ++j) a[n * px + j] = ct * tukey((double(j) + 0.5) / double(nx), taper) * g[n][j];
  }
  const auto h = fft::forward_2d(a, int(pt), int(px));
  const std::size_t mc = px / 2 + 1;
  double s = 0.0;
  for (std::size_t l = 0; l < pt; ++l) {
    const double ll = l <= pt / 2 ? double(l) : double(l) - double(pt);
    const double w = 2.0 * std::numbers::pi * ll / (double(pt) * dt);
    for (std::size_t m = 0; m < mc; ++m) {
      const double k = 2.0 * std::numbers::pi * double(m) / (double(px) * dx);
      const double mult = (m == 0 || m == px / 2) ? 1.0 : 2.0;
      s += mult * k * k * std::norm(h[l * mc + m]) / (1.0 + k * k + w * w);
    }
  }
  return std::sqrt(dx * dt * s / (double(pt) * double(px)));
}

}  // namespace detail

/// Splits eta'(u) times the equation into
///   eta_t + q_x = I1 + ... + I6,
/// I1 = d_x(eps eta' u_x), I2 = -eps eta'' u_x^2,
/// I3 = -d_x(eta' (b1 u_xx + b2 u_tx)), I4 = eta'' u_x (b1 u_xx + b2 u_tx),
/// I5 = -d_x(c eta' u_txxx), I6 = c eta'' u_x u_txxx.
/// eta_t is taken as eta'(u) u_t and q_x as eta'(u) times the discrete flux
/// divergence of the model.
inline ResidualReport residual_decomposition(const SpaceTimeRun& run, const EntropyPair& pair,
                                             const ResidualOptions& opt, const std::vector<Bump>& bumps) {
  if (!pair.has_second_derivative())
    throw std::invalid_argument("residual_decomposition: entropy '" + pair.name() + "' lacks a second derivative");
  if (run.size() < 2) throw std::invalid_argument("residual_decomposition: run needs at least 2 samples");
  const GridSpec& grid = run.grid;
  const ModelSpec& m = run.model;
  const std::size_t N = grid.size();
  const int n = int(N);
  const double dt = run.times[1] - run.times[0];
  for (std::size_t i = 1; i < run.size(); ++i)
    if (std::abs((run.times[i] - run.times[i - 1]) - dt) > 1e-9 * std::max(1.0, dt))
      throw std::invalid_argument("residual_decomposition: samples must be uniform in time");

  const auto wt = window_weights(grid.x(0), grid.dx(), N, opt.window);
  std::vector<std::size_t> nodes;
  for (std::size_t j = 0; j < N; ++j)
    if (grid.x(j) >= opt.window.lo && grid.x(j) <= opt.window.hi) nodes.push_back(j);
  const auto tw = trapezoid_weights(run.times);

  ResidualReport r;
  r.epsilon = m.epsilon;
  r.beta = m.beta;
  r.pair = pair.name();
  std::array<std::vector<std::vector<double>>, 3> flux_fields;  // g1, g3, g5 on the window nodes

  // Per sample: the six terms and the chain-rule left side, on all nodes.
  SpaceTimeSamples lhs{grid.x(0), grid.dx(), run.times, {}};
  std::array<SpaceTimeSamples, kResidualTerms> terms;
  for (auto& t : terms) t = SpaceTimeSamples{grid.x(0), grid.dx(), run.times, {}};

  double point_num = 0.0, point_den = 0.0;
  for (std::size_t s = 0; s < run.size(); ++s) {
    const auto uh = to_spectrum(run.u[s]);
    const auto vh = to_spectrum(run.v[s]);
    auto phys = [&](const Spectrum& h, int order) { return fft::inverse(differentiated(h, grid, order), n); };
    const auto u = phys(uh, 0), ux = phys(uh, 1), uxx = phys(uh, 2), uxxx = phys(uh, 3);
    const auto v = phys(vh, 0), vx = phys(vh, 1), vxx = phys(vh, 2), vxxx = phys(vh, 3), vxxxx = phys(vh, 4);
    const auto nl = m.nonlinearity != 0.0 ? fft::inverse(detail::nonlinear_spectrum(m, grid, uh), n)
                                          : std::vector<double>(N, 0.0);

    std::vector<double> A(N);
    std::array<std::vector<double>, kResidualTerms> I;
    for (auto& x : I) x.assign(N, 0.0);
    std::array<std::vector<double>, 3> g;
    for (auto& x : g) x.assign(nodes.size(), 0.0);

    for (std::size_t j = 0; j < N; ++j) {
      const double e1 = pair.deta(u[j]), e2 = pair.d2eta(u[j]);
      const double disp = m.dispersion * uxx[j] + m.mixed_dispersion * vx[j];
      const double disp_x = m.dispersion * uxxx[j] + m.mixed_dispersion * vxx[j];
      A[j] = e1 * (v[j] + m.nonlinearity * nl[j] + m.advection * ux[j]);
      I[0][j] = m.epsilon * (e2 * ux[j] * ux[j] + e1 * uxx[j]);
      I[1][j] = -m.epsilon * e2 * ux[j] * ux[j];
      I[2][j] = -(e2 * ux[j] * disp + e1 * disp_x);
      I[3][j] = e2 * ux[j] * disp;
      I[4][j] = -m.higher_mixed * (e2 * ux[j] * vxxx[j] + e1 * vxxxx[j]);
      I[5][j] = m.higher_mixed * e2 * ux[j] * vxxx[j];
      double sum = 0.0, mag = std::abs(A[j]);
      for (const auto& t : I) {
        sum += t[j];
        mag += std::abs(t[j]);
      }
      point_num = std::max(point_num, std::abs(A[j] - sum));
      point_den = std::max(point_den, mag);
    }
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const std::size_t j = nodes[q];
      const double e1 = pair.deta(u[j]);
      g[0][q] = m.epsilon * e1 * ux[j];
      g[1][q] = -e1 * (m.dispersion * uxx[j] + m.mixed_dispersion * vx[j]);
      g[2][q] = -m.higher_mixed * e1 * vxxx[j];
    }
    for (std::size_t k = 0; k < kResidualTerms; ++k) {
      double row = 0.0;
      for (std::size_t j = 0; j < N; ++j) row += wt[j] * std::abs(I[k][j]);
      r.l1[k] += tw[s] * row;
    }
    for (std::size_t k = 0; k < 3; ++k) flux_fields[k].push_back(std::move(g[k]));
    lhs.values.push_back(std::move(A));
    for (std::size_t k = 0; k < kResidualTerms; ++k) terms[k].values.push_back(std::move(I[k]));
  }

  for (std::size_t k = 0; k < kResidualTerms; ++k) r.hminus1[k] = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < 3; ++k)
    r.hminus1[2 * k] = detail::hminus1_of_divergence(flux_fields[k], grid.dx(), dt, opt.taper);

  r.identity_pointwise = point_den > 0.0 ? point_num / point_den : 0.0;
  double num = 0.0, den = 0.0;
  for (const auto& b : bumps) {
    const auto phi = b.as_test_function();
    detail::require_inside(phi, lhs, opt.window);
    double diff = 0.0, mag = 0.0;
    diff = detail::space_time_quadrature(lhs, phi, [&](std::size_t n_, std::size_t j, double t, double x) {
      double sum = 0.0;
      for (const auto& T : terms) sum += T.values[n_][j];
      return (lhs.values[n_][j] - sum) * phi.phi(t, x);
    });
    mag = detail::space_time_quadrature(lhs, phi, [&](std::size_t n_, std::size_t j, double t, double x) {
      double a = std::abs(lhs.values[n_][j]);
      for (const auto& T : terms) a += std::abs(T.values[n_][j]);
      return a * phi.phi(t, x);
    });
    num = std::max(num, std::abs(diff));
    den = std::max(den, mag);
  }
  r.identity_weak = den > 0.0 ? num / den : 0.0;
  return r;
}

// ---- ledger bounds ----------------------------------------------------------

enum class LedgerFamily {
  energy,              // |u|^2 + beta^2 |uxx|^2 + 2 eps int |ux|^2
  h1_uniform,          // beta |ux|^2, beta^1/2 eps^2 |ux|^2, beta^3/2 eps^2 |uxx|^2, beta^3 |uxxx|^2
  time_derivative,     // integrated u_t families, as listed
  time_derivative_alt, // same with beta^1/2 eps int |ut|^2
  linf,                // beta^1/2 sup |u|^2
  h3_energy,           // beta |ux|^2 + beta^3 |uxxx|^2 + (3 beta eps/2) int |uxx|^2
  ux_linf,             // beta^3/2 sup |ux|^2
  l4,                  // |u|_4^4
  h4_uniform,
  time_derivative_h4,
  bbm_energy,          // |u|^2 + beta |ux|^2 + 2 eps int |ux|^2
  bbm_linf,            // beta^1/2 sup |u|^2
  bbm_h2,
};

inline constexpr std::array<LedgerFamily, 13> kAllFamilies{
    LedgerFamily::energy,     LedgerFamily::h1_uniform,         LedgerFamily::time_derivative,
    LedgerFamily::time_derivative_alt, LedgerFamily::linf,      LedgerFamily::h3_energy,
    LedgerFamily::ux_linf,    LedgerFamily::l4,                 LedgerFamily::h4_uniform,
    LedgerFamily::time_derivative_h4, LedgerFamily::bbm_energy, LedgerFamily::bbm_linf,
    LedgerFamily::bbm_h2};

inline std::string to_string(LedgerFamily f) {
  switch (f) {
    case LedgerFamily::energy: return "energy";
    case LedgerFamily::h1_uniform: return "h1_uniform";
    case LedgerFamily::time_derivative: return "time_derivative";
    case LedgerFamily::time_derivative_alt: return "time_derivative_alt";
    case LedgerFamily::linf: return "linf";
    case LedgerFamily::h3_energy: return "h3_energy";
    case LedgerFamily::ux_linf: return "ux_linf";
    case LedgerFamily::l4: return "l4";
    case LedgerFamily::h4_uniform: return "h4_uniform";
    case LedgerFamily::time_derivative_h4: return "time_derivative_h4";
    case LedgerFamily::bbm_energy: return "bbm_energy";
    case LedgerFamily::bbm_linf: return "bbm_linf";
    case LedgerFamily::bbm_h2: return "bbm_h2";
  }
  return "?";
}

/// Initial-datum condition whose C0 bounds the family.
inline DatumCondition condition_for(LedgerFamily f) {
  switch (f) {
    case LedgerFamily::energy:
    case LedgerFamily::h1_uniform:
    case LedgerFamily::time_derivative:
    case LedgerFamily::time_derivative_alt:
    case LedgerFamily::linf: return DatumCondition::smooth_h3;
    case LedgerFamily::bbm_energy:
    case LedgerFamily::bbm_linf:
    case LedgerFamily::bbm_h2: return DatumCondition::bbm;
    default: return DatumCondition::smooth_h4;
  }
}

inline bool is_bbm_family(LedgerFamily f) {
  return f == LedgerFamily::bbm_energy || f == LedgerFamily::bbm_linf || f == LedgerFamily::bbm_h2;
}

/// One scaled quantity: sum_i coef_i * series_i(t) (squared-norm form).
struct LedgerExpression {
  std::string name;
  std::vector<std::pair<double, std::string>> parts;
};

inline std::vector<LedgerExpression> family_expressions(LedgerFamily f, double eps, double beta) {
  namespace S = series;
  const double b = beta, e = eps, sb = std::sqrt(beta);
  auto I = [](std::string_view s) { return S::integral_name(s); };
  auto str = [](std::string_view s) { return std::string(s); };
  switch (f) {
    case LedgerFamily::energy:
      return {{"u^2 + beta^2 uxx^2 + 2 eps int ux^2",
               {{1.0, str(S::u_l2sq)}, {b * b, str(S::uxx_l2sq)}, {2 * e, I(S::ux_l2sq)}}}};
    case LedgerFamily::h1_uniform:
      return {{"beta ux^2", {{b, str(S::ux_l2sq)}}},
              {"beta^1/2 eps^2 ux^2", {{sb * e * e, str(S::ux_l2sq)}}},
              {"beta^3/2 eps^2 uxx^2", {{b * sb * e * e, str(S::uxx_l2sq)}}},
              {"beta^3 uxxx^2", {{b * b * b, str(S::uxxx_l2sq)}}}};
    case LedgerFamily::time_derivative:
    case LedgerFamily::time_derivative_alt: {
      std::vector<LedgerExpression> v{
          {"beta^3/2 eps int utx^2", {{b * sb * e, I(S::utx_l2sq)}}},
          {"beta^7/2 eps int utxxx^2", {{b * b * b * sb * e, I(S::utxxx_l2sq)}}},
          {"beta^5/2 eps int utxx^2", {{b * b * sb * e, I(S::utxx_l2sq)}}},
          {"beta eps int uxx^2", {{b * e, I(S::uxx_l2sq)}}}};
      if (f == LedgerFamily::time_derivative)
        v.push_back({"beta^1/2 eps^2 int ut^2", {{sb * e * e, I(S::ut_l2sq)}}});
      else
        v.push_back({"beta^1/2 eps int ut^2", {{sb * e, I(S::ut_l2sq)}}});
      return v;
    }
    case LedgerFamily::linf:
    case LedgerFamily::bbm_linf: return {{"beta^1/2 sup u^2", {{sb, "sup_sq:" + str(S::u_sup)}}}};
    case LedgerFamily::h3_energy:
      return {{"beta ux^2 + beta^3 uxxx^2 + 3 beta eps/2 int uxx^2",
               {{b, str(S::ux_l2sq)}, {b * b * b, str(S::uxxx_l2sq)}, {1.5 * b * e, I(S::uxx_l2sq)}}}};
    case LedgerFamily::ux_linf: return {{"beta^3/2 sup ux^2", {{b * sb, "sup_sq:" + str(S::ux_sup)}}}};
    case LedgerFamily::l4: return {{"u_4^4", {{1.0, str(S::u_l4p4)}}}};
    case LedgerFamily::h4_uniform:
      return {{"eps^2 ux^2", {{e * e, str(S::ux_l2sq)}}},
              {"beta eps^2 uxx^2", {{b * e * e, str(S::uxx_l2sq)}}},
              {"beta^2 uxx^2", {{b * b, str(S::uxx_l2sq)}}},
              {"beta^2 eps^2 uxxx^2", {{b * b * e * e, str(S::uxxx_l2sq)}}},
              {"beta^2 uxxxx^2", {{b * b, str(S::uxxxx_l2sq)}}}};
    case LedgerFamily::time_derivative_h4:
      return {{"beta eps int utx^2", {{b * e, I(S::utx_l2sq)}}},
              {"eps int ut^2", {{e, I(S::ut_l2sq)}}},
              {"beta^3 eps int utxxx^2", {{b * b * b * e, I(S::utxxx_l2sq)}}},
              {"beta^2 eps int utxx^2", {{b * b * e, I(S::utxx_l2sq)}}},
              {"eps int (u ux)^2", {{e, I(S::uux_l2sq)}}},
              {"eps^3 int uxx^2", {{e * e * e, I(S::uxx_l2sq)}}},
              {"beta^2 eps int uxxx^2", {{b * b * e, I(S::uxxx_l2sq)}}}};
    case LedgerFamily::bbm_energy:
      return {{"u^2 + beta ux^2 + 2 eps int ux^2",
               {{1.0, str(S::u_l2sq)}, {b, str(S::ux_l2sq)}, {2 * e, I(S::ux_l2sq)}}}};
    case LedgerFamily::bbm_h2:
      return {{"beta ux^2 + (2 beta^2 + beta^3/2 eps^2)/2 uxx^2 + 3 beta eps/2 int uxx^2 + beta^5/2 eps/2 int "
               "utxx^2 + beta^3/2 eps utx^2",
               {{b, str(S::ux_l2sq)},
                {0.5 * (2 * b * b + b * sb * e * e), str(S::uxx_l2sq)},
                {1.5 * b * e, I(S::uxx_l2sq)},
                {0.5 * b * b * sb * e, I(S::utxx_l2sq)},
                {b * sb * e, str(S::utx_l2sq)}}}};
  }
  return {};
}

struct LedgerTermResult {
  std::string name;
  double sup = 0.0;
};

struct FamilyVerdict {
  LedgerFamily family = LedgerFamily::energy;
  double c0 = 0.0;
  double bound = 0.0;
  std::vector<LedgerTermResult> terms;
  bool bounded = true;
  std::vector<double> first_term_series;  // time series of the first expression
  double drift = 0.0;                     // (last - first) / max(first, tiny) of the first expression
};

/// Suprema over the run of each scaled quantity in `family`; bounded when all
/// are <= bound_factor * c0.
inline FamilyVerdict ledger_bounds_check(const NormLedger& ledger, double eps, double beta, LedgerFamily family,
                                         double c0, double bound_factor = 10.0) {
  FamilyVerdict v;
  v.family = family;
  v.c0 = c0;
  v.bound = bound_factor * c0;
  const auto exprs = family_expressions(family, eps, beta);
  for (std::size_t e = 0; e < exprs.size(); ++e) {
    const auto& ex = exprs[e];
    std::vector<double> series(ledger.size(), 0.0);
    for (const auto& [coef, name] : ex.parts) {
      const bool squared = name.rfind("sup_sq:", 0) == 0;
      const std::string key = squared ? name.substr(7) : name;
      if (!ledger.has(key))
        throw std::invalid_argument("ledger_bounds_check: family " + to_string(family) + " needs missing series '" +
                                    key + "'");
      const auto& s = ledger.get(key);
      for (std::size_t i = 0; i < s.size(); ++i) series[i] += coef * (squared ? s[i] * s[i] : s[i]);
    }
    const double sup = series.empty() ? 0.0 : *std::max_element(series.begin(), series.end());
    v.terms.push_back({ex.name, sup});
    v.bounded = v.bounded && sup <= v.bound;
    if (e == 0) {
      v.first_term_series = series;
      if (!series.empty()) v.drift = (series.back() - series.front()) / std::max(series.front(), 1e-300);
    }
  }
  return v;
}

/// beta^{1/4} sup_{t,x} |u|.
inline double linf_scaled(const NormLedger& ledger, double beta) {
  return std::pow(beta, 0.25) * ledger.sup(series::u_sup);
}

}  // namespace rkdv
