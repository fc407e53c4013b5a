#pragma once

// Entropy / entropy-flux pairs for f = u^2 or u^2/2:
//   q(u) = int_0^u f'(xi) eta'(xi) dxi.
// Fluxes without a closed form are tabulated on a uniform grid by adaptive
// Gauss-Kronrod quadrature and evaluated by cubic Hermite interpolation
// (q' = f' eta' is known exactly at the nodes).

#include "rkdv/models.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rkdv {

using ScalarFn = std::function<double(double)>;

struct EntropyTable {
  double lo = -4.0;
  double hi = 4.0;
  std::size_t intervals = 8000;
};

class EntropyPair {
 public:
  /// Closed-form pair; q and q' are supplied.
  EntropyPair(std::string name, FluxConvention flux, ScalarFn eta, ScalarFn deta, std::optional<ScalarFn> d2eta,
              ScalarFn q, bool convex)
      : name_(std::move(name)), flux_(flux), eta_(std::move(eta)), deta_(std::move(deta)),
        d2eta_(std::move(d2eta)), q_closed_(std::move(q)), convex_(convex) {}

  /// Pair whose flux is obtained by quadrature and tabulated on `table`.
  EntropyPair(std::string name, FluxConvention flux, ScalarFn eta, ScalarFn deta, std::optional<ScalarFn> d2eta,
              bool convex, EntropyTable table = {})
      : name_(std::move(name)), flux_(flux), eta_(std::move(eta)), deta_(std::move(deta)),
        d2eta_(std::move(d2eta)), convex_(convex) {
    build_table(table);
  }

  const std::string& name() const { return name_; }
  FluxConvention flux() const { return flux_; }
  bool convex() const { return convex_; }
  bool has_second_derivative() const { return d2eta_.has_value(); }
  bool tabulated() const { return !q_closed_; }

  bool compact_support() const { return support_.has_value(); }
  /// Interval outside which eta'' vanishes, when compact.
  std::optional<std::pair<double, double>> support() const { return support_; }
  void set_support(double lo, double hi) { support_ = std::make_pair(lo, hi); }

  double eta(double u) const { return eta_(u); }
  double deta(double u) const { return deta_(u); }
  double d2eta(double u) const {
    if (!d2eta_) throw std::logic_error("entropy pair '" + name_ + "' has no second derivative");
    return (*d2eta_)(u);
  }

  /// q'(u) = f'(u) eta'(u).
  double dq(double u) const { return flux_derivative(flux_, u) * deta_(u); }

  double q(double u) const {
    if (q_closed_) return q_closed_(u);
    if (u < table_.lo || u > table_.hi) return integrate_dq(0.0, u);
    const double h = (table_.hi - table_.lo) / static_cast<double>(table_.intervals);
    auto i = static_cast<std::size_t>((u - table_.lo) / h);
    if (i >= table_.intervals) i = table_.intervals - 1;
    const double x0 = table_.lo + static_cast<double>(i) * h;
    const double s = (u - x0) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * qv_[i] + h10 * h * dqv_[i] + h01 * qv_[i + 1] + h11 * h * dqv_[i + 1];
  }

  /// Tabulation nodes (empty for closed-form pairs).
  std::vector<double> nodes() const {
    std::vector<double> x;
    if (!tabulated()) return x;
    const double h = (table_.hi - table_.lo) / static_cast<double>(table_.intervals);
    for (std::size_t i = 0; i <= table_.intervals; ++i) x.push_back(table_.lo + static_cast<double>(i) * h);
    return x;
  }

  double integrate_dq(double a, double b, unsigned max_depth = 10) const {
    using boost::math::quadrature::gauss_kronrod;
    if (a == b) return 0.0;
    auto f = [this](double x) { return dq(x); };
    return gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, 1e-13);
  }

 private:
  void build_table(const EntropyTable& t) {
    if (!(t.lo <= 0.0 && t.hi >= 0.0 && t.lo < t.hi) || t.intervals < 2)
      throw std::invalid_argument("EntropyTable: range must contain 0 and have at least 2 intervals");
    table_ = t;
    const double h = (t.hi - t.lo) / static_cast<double>(t.intervals);
    const std::size_t n = t.intervals + 1;
    qv_.assign(n, 0.0);
    dqv_.assign(n, 0.0);
    // Integrate outward from the node nearest 0 so that q(0) = 0 up to one panel.
    const auto i0 = static_cast<std::size_t>(std::llround(-t.lo / h));
    const double x0 = t.lo + static_cast<double>(i0) * h;
    qv_[i0] = integrate_dq(0.0, x0, 0);
    for (std::size_t i = i0; i + 1 < n; ++i) {
      const double a = t.lo + static_cast<double>(i) * h;
      qv_[i + 1] = qv_[i] + integrate_dq(a, a + h, 0);
    }
    for (std::size_t i = i0; i > 0; --i) {
      const double b = t.lo + static_cast<double>(i) * h;
      qv_[i - 1] = qv_[i] - integrate_dq(b - h, b, 0);
    }
    for (std::size_t i = 0; i < n; ++i) dqv_[i] = dq(t.lo + static_cast<double>(i) * h);
  }

  std::string name_;
  FluxConvention flux_;
  ScalarFn eta_, deta_;
  std::optional<ScalarFn> d2eta_;
  ScalarFn q_closed_;
  bool convex_ = false;
  std::optional<std::pair<double, double>> support_;
  EntropyTable table_{};
  std::vector<double> qv_, dqv_;
};

/// eta = u^2, q = (4/3) u^3 for f = u^2 and (2/3) u^3 for f = u^2/2.
inline EntropyPair square_entropy(FluxConvention fc = FluxConvention::square) {
  const double c = fc == FluxConvention::square ? 4.0 / 3.0 : 2.0 / 3.0;
  return EntropyPair(
      "square", fc, [](double u) { return u * u; }, [](double u) { return 2.0 * u; }, ScalarFn([](double) { return 2.0; }),
      [c](double u) { return c * u * u * u; }, true);
}

/// eta = sqrt((u-c)^2 + delta^2) - delta, a C^2 smoothing of |u - c|.
inline EntropyPair kruzkov_smoothed(double c, double delta, FluxConvention fc = FluxConvention::square,
                                    EntropyTable table = {}) {
  if (!(delta > 0.0)) throw std::invalid_argument("kruzkov_smoothed: delta must be positive");
  const double d2 = delta * delta;
  return EntropyPair(
      "kruzkov_smoothed", fc, [=](double u) { return std::sqrt((u - c) * (u - c) + d2) - delta; },
      [=](double u) { return (u - c) / std::sqrt((u - c) * (u - c) + d2); },
      ScalarFn([=](double u) {
        const double r = (u - c) * (u - c) + d2;
        return d2 / (r * std::sqrt(r));
      }),
      true, table);
}

/// Convex entropy equal to |u - c| outside [c - r, c + r] and with
/// eta'' = (2/r)(35/32)(1 - s^2)^3, s = (u - c)/r, inside.
inline EntropyPair compact_bump(double c, double r, FluxConvention fc = FluxConvention::square,
                                EntropyTable table = {}) {
  if (!(r > 0.0)) throw std::invalid_argument("compact_bump: radius must be positive");
  auto eta = [=](double u) {
    const double s = (u - c) / r;
    if (std::abs(s) >= 1.0) return std::abs(u - c);
    const double s2 = s * s;
    return r * (35.0 / 16.0) * (s2 / 2 - s2 * s2 / 4 + s2 * s2 * s2 / 10 - s2 * s2 * s2 * s2 / 56) + r * 35.0 / 128.0;
  };
  auto deta = [=](double u) {
    const double s = (u - c) / r;
    if (s >= 1.0) return 1.0;
    if (s <= -1.0) return -1.0;
    const double s2 = s * s;
    return (35.0 / 16.0) * s * (1 - s2 + 3 * s2 * s2 / 5 - s2 * s2 * s2 / 7);
  };
  auto d2eta = [=](double u) {
    const double s = (u - c) / r;
    if (std::abs(s) >= 1.0) return 0.0;
    const double w = 1 - s * s;
    return (2.0 / r) * (35.0 / 32.0) * w * w * w;
  };
  EntropyPair p("compact_bump", fc, eta, deta, ScalarFn(d2eta), true, table);
  p.set_support(c - r, c + r);
  return p;
}

/// Arbitrary entropy; the flux comes from quadrature.
inline EntropyPair custom_entropy(std::string name, ScalarFn eta, ScalarFn deta, std::optional<ScalarFn> d2eta,
                                  bool convex, FluxConvention fc = FluxConvention::square, EntropyTable table = {}) {
  return EntropyPair(std::move(name), fc, std::move(eta), std::move(deta), std::move(d2eta), convex, table);
}

}  // namespace rkdv
