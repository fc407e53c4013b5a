#pragma once

// Equation catalog in the form (1 + m(d/dx)) du/dt = R(u):
//
//   du/dt + a u_x + k d_x(u^n) + b1 u_xxx + b2 u_txx + c u_txxxx = eps u_xx
//
// so the implicit Fourier symbol is M(k) = 1 - b2 k^2 + c k^4 and R collects
// every term without a time derivative.

#include "rkdv/grid.hpp"
#include "rkdv/snapshot.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace rkdv {

/// Which flux the nonlinear term carries: d_x(u^2) or u u_x = d_x(u^2/2).
enum class FluxConvention { square, half_square };

inline double flux_value(FluxConvention fc, double u) { return fc == FluxConvention::square ? u * u : 0.5 * u * u; }
inline double flux_derivative(FluxConvention fc, double u) { return fc == FluxConvention::square ? 2.0 * u : u; }
inline FluxTag flux_tag(FluxConvention fc) { return fc == FluxConvention::square ? FluxTag::square : FluxTag::half_square; }

enum class NonlinearForm { skew, conservative };

struct ModelSpec {
  double advection = 0.0;      // a
  double nonlinearity = 1.0;   // k
  int power = 2;               // n
  double dispersion = 0.0;     // b1, coefficient of u_xxx
  double mixed_dispersion = 0.0;  // b2, coefficient of u_txx
  double higher_mixed = 0.0;   // c >= 0, coefficient of u_txxxx
  double epsilon = 0.0;        // diffusion
  double beta = 0.0;           // regularization parameter the preset was built from
  FluxConvention flux = FluxConvention::square;
  NonlinearForm form = NonlinearForm::skew;
  std::string label = "custom";
};

inline constexpr std::array<std::string_view, 7> kPresetNames{
    "rosenau_kdv_reg", "rosenau_kdv_rlw", "rosenau_rlw", "rosenau", "kdv", "bbm_reg", "burgers_viscous"};

/// Builds a named preset. Throws std::invalid_argument for unknown names or
/// negative parameters.
inline ModelSpec make_preset(std::string_view name, double beta, double epsilon) {
  if (!(beta >= 0.0) || !(epsilon >= 0.0))
    throw std::invalid_argument("make_preset: beta and epsilon must be nonnegative");
  ModelSpec m;
  m.beta = beta;
  m.epsilon = epsilon;
  m.label = std::string(name);
  if (name == "rosenau_kdv_reg") {
    m.dispersion = beta;
    m.higher_mixed = beta * beta;
  } else if (name == "rosenau_kdv_rlw") {
    m.dispersion = beta;
    m.mixed_dispersion = -beta;
    m.higher_mixed = beta * beta;
  } else if (name == "rosenau_rlw") {
    m.mixed_dispersion = -beta;
    m.higher_mixed = beta * beta;
  } else if (name == "rosenau") {
    m.higher_mixed = beta * beta;
  } else if (name == "kdv") {
    m.dispersion = beta;
  } else if (name == "bbm_reg") {
    m.mixed_dispersion = -beta;
    m.flux = FluxConvention::half_square;
  } else if (name == "burgers_viscous") {
    m.beta = 0.0;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  return m;
}

inline bool is_preset_name(std::string_view name) {
  for (auto p : kPresetNames)
    if (p == name) return true;
  return false;
}

/// beta(eps) = C * eps^p. p = 4 is the O(eps^4) regime, p > 4 the o(eps^4) one.
struct ScalingPath {
  double coupling = 1.0;
  double exponent = 4.0;

  ScalingPath() = default;
  ScalingPath(double c, double p) : coupling(c), exponent(p) {
    if (!(c > 0.0) || !(p > 0.0)) throw std::invalid_argument("ScalingPath: coupling and exponent must be positive");
  }
  double beta(double eps) const { return coupling * std::pow(eps, exponent); }
  bool little_o() const { return exponent > 4.0; }
};

inline double sobolev_multiplier(const ModelSpec& m, double k) {
  const double k2 = k * k;
  return 1.0 - m.mixed_dispersion * k2 + m.higher_mixed * k2 * k2;
}

namespace detail {

inline void require_quadratic(const ModelSpec& m) {
  if (m.power != 2)
    throw std::invalid_argument("model '" + m.label + "': nonlinearity power " + std::to_string(m.power) +
                                " unsupported (only n = 2)");
}

/// Spectrum of the nonlinear term N(u), whose continuum value is d_x f(u).
inline Spectrum nonlinear_spectrum(const ModelSpec& m, const GridSpec& grid, const Spectrum& u_hat) {
  const int n = static_cast<int>(grid.size());
  const double s = m.flux == FluxConvention::square ? 1.0 : 0.5;
  Spectrum ud = u_hat;
  dealias_in_place(ud, grid);
  const auto u = fft::inverse(ud, n);

  std::vector<double> uu(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) uu[j] = u[j] * u[j];
  auto sq = fft::forward(uu);
  dealias_in_place(sq, grid);
  differentiate_in_place(sq, grid, 1);

  if (m.form == NonlinearForm::conservative) {
    for (auto& c : sq) c *= s;
    return sq;
  }

  const auto ux = fft::inverse(differentiated(ud, grid, 1), n);
  for (std::size_t j = 0; j < u.size(); ++j) uu[j] = u[j] * ux[j];
  auto adv = fft::forward(uu);
  dealias_in_place(adv, grid);

  // d_x(u^2) = (2/3) d_x(u^2) + (2/3) u u_x, the split that makes <u, N(u)> = 0.
  Spectrum out(sq.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * (2.0 / 3.0) * (sq[i] + adv[i]);
  return out;
}

}  // namespace detail

/// Spectrum of R(u) = -a u_x - k N(u) - b1 u_xxx + eps u_xx.
inline Spectrum rhs_spectrum(const ModelSpec& m, const GridSpec& grid, const Spectrum& u_hat) {
  detail::require_quadratic(m);
  Spectrum out(u_hat.size(), Complex(0.0));
  if (m.nonlinearity != 0.0) {
    const auto nl = detail::nonlinear_spectrum(m, grid, u_hat);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -m.nonlinearity * nl[i];
  }
  const std::size_t nyq = grid.size() / 2;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double k = grid.mode_wavenumber(i);
    const Complex ik(0.0, k);
    Complex lin = -m.epsilon * k * k;  // eps (ik)^2
    if (i != nyq) lin += -m.advection * ik - m.dispersion * ik * ik * ik;
    out[i] += lin * u_hat[i];
  }
  return out;
}

/// Spectrum of du/dt = M^{-1} R(u). The Nyquist mode is not evolved.
inline Spectrum velocity_spectrum(const ModelSpec& m, const GridSpec& grid, const Spectrum& u_hat) {
  auto r = rhs_spectrum(m, grid, u_hat);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] /= sobolev_multiplier(m, grid.mode_wavenumber(i));
  r[grid.size() / 2] = 0.0;
  return r;
}

inline Field explicit_rhs(const ModelSpec& m, const Field& u) {
  return from_spectrum(u.grid(), rhs_spectrum(m, u.grid(), to_spectrum(u)), u.time());
}

inline Field velocity(const ModelSpec& m, const Field& u) {
  return from_spectrum(u.grid(), velocity_spectrum(m, u.grid(), to_spectrum(u)), u.time());
}

}  // namespace rkdv
