#pragma once

// Norm ledger: sampled norm series of a run plus their running time
// integrals. Time-derivative series are evaluated from the model velocity.

#include "rkdv/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rkdv {

namespace series {
inline constexpr std::string_view u_l2sq = "u_l2sq";
inline constexpr std::string_view u_l4p4 = "u_l4p4";
inline constexpr std::string_view ux_l2sq = "ux_l2sq";
inline constexpr std::string_view uxx_l2sq = "uxx_l2sq";
inline constexpr std::string_view uxxx_l2sq = "uxxx_l2sq";
inline constexpr std::string_view uxxxx_l2sq = "uxxxx_l2sq";
inline constexpr std::string_view ut_l2sq = "ut_l2sq";
inline constexpr std::string_view utx_l2sq = "utx_l2sq";
inline constexpr std::string_view utxx_l2sq = "utxx_l2sq";
inline constexpr std::string_view utxxx_l2sq = "utxxx_l2sq";
inline constexpr std::string_view uux_l2sq = "uux_l2sq";
inline constexpr std::string_view u_sup = "u_sup";
inline constexpr std::string_view ux_sup = "ux_sup";

/// Series whose time integrals are accumulated during stepping.
inline constexpr std::array<std::string_view, 10> integrated{
    u_l2sq, ux_l2sq, uxx_l2sq, uxxx_l2sq, uxxxx_l2sq, ut_l2sq, utx_l2sq, utxx_l2sq, utxxx_l2sq, uux_l2sq};

inline std::string integral_name(std::string_view s) { return "int_" + std::string(s); }
}  // namespace series

using NormValues = std::map<std::string, double, std::less<>>;

/// Squared L2 norm of the order-th derivative, from an unnormalized spectrum.
inline double derivative_l2_squared(std::span<const Complex> spec, const GridSpec& grid, int order) {
  const std::size_t n = grid.size();
  double s = 0.0;
  for (std::size_t m = 0; m <= n / 2; ++m) {
    if (order % 2 == 1 && m == n / 2) continue;
    const double w = (m == 0 || m == n / 2) ? 1.0 : 2.0;
    const double kp = std::pow(grid.mode_wavenumber(m), order);
    s += w * std::norm(spec[m]) * kp * kp;
  }
  return grid.dx() * s / static_cast<double>(n);
}

/// All instantaneous ledger quantities at one state. u_hat and v_hat are the
/// spectra of u and du/dt.
inline NormValues compute_norms(const GridSpec& grid, const Spectrum& u_hat, const Spectrum& v_hat,
                                bool integrated_only = false) {
  NormValues out;
  out[std::string(series::u_l2sq)] = derivative_l2_squared(u_hat, grid, 0);
  out[std::string(series::ux_l2sq)] = derivative_l2_squared(u_hat, grid, 1);
  out[std::string(series::uxx_l2sq)] = derivative_l2_squared(u_hat, grid, 2);
  out[std::string(series::uxxx_l2sq)] = derivative_l2_squared(u_hat, grid, 3);
  out[std::string(series::uxxxx_l2sq)] = derivative_l2_squared(u_hat, grid, 4);
  out[std::string(series::ut_l2sq)] = derivative_l2_squared(v_hat, grid, 0);
  out[std::string(series::utx_l2sq)] = derivative_l2_squared(v_hat, grid, 1);
  out[std::string(series::utxx_l2sq)] = derivative_l2_squared(v_hat, grid, 2);
  out[std::string(series::utxxx_l2sq)] = derivative_l2_squared(v_hat, grid, 3);

  const int n = static_cast<int>(grid.size());
  const auto u = fft::inverse(u_hat, n);
  const auto ux = fft::inverse(differentiated(u_hat, grid, 1), n);
  double uux = 0.0, l4 = 0.0, sup = 0.0, sup_x = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double p = u[j] * ux[j];
    uux += p * p;
    l4 += u[j] * u[j] * u[j] * u[j];
    sup = std::max(sup, std::abs(u[j]));
    sup_x = std::max(sup_x, std::abs(ux[j]));
  }
  out[std::string(series::uux_l2sq)] = grid.dx() * uux;
  if (!integrated_only) {
    out[std::string(series::u_l4p4)] = grid.dx() * l4;
    out[std::string(series::u_sup)] = sup;
    out[std::string(series::ux_sup)] = sup_x;
  }
  return out;
}

class NormLedger {
 public:
  /// Appends a sample. `integrals` holds the running integrals int_0^t of the
  /// integrated series, keyed by series::integral_name().
  void append(double t, const NormValues& values, const NormValues& integrals) {
    if (!times_.empty() && !(t > times_.back()))
      throw std::invalid_argument("NormLedger: sample times must be strictly increasing");
    const std::size_t idx = times_.size();
    auto put = [&](const std::string& name, double v) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("NormLedger: entry '" + name + "' must be finite and nonnegative");
      auto& s = series_[name];
      if (s.size() != idx) throw std::invalid_argument("NormLedger: series '" + name + "' has a gap");
      s.push_back(v);
    };
    for (const auto& [name, v] : values) put(name, v);
    for (const auto& [name, v] : integrals) put(name, v);
    times_.push_back(t);
  }

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  bool has(std::string_view name) const { return series_.find(name) != series_.end(); }

  const std::vector<double>& get(std::string_view name) const {
    auto it = series_.find(name);
    if (it == series_.end()) throw std::out_of_range("NormLedger: missing series '" + std::string(name) + "'");
    return it->second;
  }

  double sup(std::string_view name) const {
    const auto& s = get(name);
    return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
  }

  const std::map<std::string, std::vector<double>, std::less<>>& all() const { return series_; }

 private:
  std::vector<double> times_;
  std::map<std::string, std::vector<double>, std::less<>> series_;
};

}  // namespace rkdv
