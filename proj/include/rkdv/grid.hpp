#pragma once

// Periodic 1-D grid on [-L, L) with Fourier differentiation, 2/3-rule
// dealiased products and rectangle-rule quadrature.

#include "rkdv/fft.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rkdv {

using fft::Complex;
using Spectrum = std::vector<Complex>;

class GridSpec {
 public:
  GridSpec(double half_width, std::size_t n_points) : half_width_(half_width), n_(n_points) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw std::invalid_argument("GridSpec: half width must be positive and finite");
    if (n_points < 16 || (n_points & (n_points - 1)) != 0)
      throw std::invalid_argument("GridSpec: point count must be a power of two >= 16, got " +
                                  std::to_string(n_points));
  }

  double half_width() const { return half_width_; }
  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }
  double dx() const { return 2.0 * half_width_ / static_cast<double>(n_); }
  double x(std::size_t j) const { return -half_width_ + static_cast<double>(j) * dx(); }

  /// Wavenumber of r2c coefficient m, m in [0, N/2].
  double mode_wavenumber(std::size_t m) const { return std::numbers::pi * static_cast<double>(m) / half_width_; }
  double k_max() const { return mode_wavenumber(n_ / 2); }

  /// All N wavenumbers pi*j/L for j in [-N/2, N/2), ascending.
  std::vector<double> wavenumbers() const {
    std::vector<double> k(n_);
    const auto half = static_cast<long>(n_ / 2);
    for (long j = -half; j < half; ++j) k[std::size_t(j + half)] = std::numbers::pi * double(j) / half_width_;
    return k;
  }

  /// 2/3-rule: keep |k| <= (2/3) k_max. Indexed like the r2c spectrum.
  bool dealias_keeps(std::size_t m) const { return 3 * m <= n_; }

  std::vector<bool> dealias_mask() const {
    std::vector<bool> mask(spectrum_size());
    for (std::size_t m = 0; m < mask.size(); ++m) mask[m] = dealias_keeps(m);
    return mask;
  }

  bool operator==(const GridSpec& other) const { return half_width_ == other.half_width_ && n_ == other.n_; }

 private:
  double half_width_;
  std::size_t n_;
};

class Field {
 public:
  Field(GridSpec grid, std::vector<double> values, double t = 0.0)
      : grid_(grid), values_(std::move(values)), t_(t) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("Field: expected " + std::to_string(grid_.size()) + " values, got " +
                                  std::to_string(values_.size()));
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (!std::isfinite(values_[j])) {
        std::ostringstream msg;
        msg << "Field: non-finite value " << values_[j] << " at node " << j << " (x = " << grid_.x(j) << ")";
        throw std::invalid_argument(msg.str());
      }
    }
    if (!std::isfinite(t_)) throw std::invalid_argument("Field: non-finite time");
  }

  template <class F>
  static Field from_function(const GridSpec& grid, F&& f, double t = 0.0) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
    return Field(grid, std::move(v), t);
  }

  static Field zeros(const GridSpec& grid, double t = 0.0) {
    return Field(grid, std::vector<double>(grid.size(), 0.0), t);
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  std::size_t size() const { return values_.size(); }
  double time() const { return t_; }
  Field with_time(double t) const { return Field(grid_, values_, t); }

 private:
  GridSpec grid_;
  std::vector<double> values_;
  double t_;
};

inline void require_same_grid(const Field& f, const Field& g, const char* where) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

// ---- spectral helpers ---------------------------------------------------

inline Spectrum to_spectrum(const Field& f) { return fft::forward(f.values()); }

inline Field from_spectrum(const GridSpec& grid, std::span<const Complex> spec, double t = 0.0) {
  return Field(grid, fft::inverse(spec, static_cast<int>(grid.size())), t);
}

/// Multiply by (ik)^order; the Nyquist coefficient is zeroed for odd orders.
inline void differentiate_in_place(Spectrum& spec, const GridSpec& grid, int order) {
  if (order < 0) throw std::invalid_argument("derivative order must be nonnegative");
  if (order == 0) return;
  const std::size_t nyq = grid.size() / 2;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    const double k = grid.mode_wavenumber(m);
    Complex factor = 1.0;
    for (int i = 0; i < order; ++i) factor *= Complex(0.0, k);
    spec[m] *= factor;
  }
  if (order % 2 == 1) spec[nyq] = 0.0;
}

inline Spectrum differentiated(Spectrum spec, const GridSpec& grid, int order) {
  differentiate_in_place(spec, grid, order);
  return spec;
}

inline void dealias_in_place(Spectrum& spec, const GridSpec& grid) {
  for (std::size_t m = 0; m < spec.size(); ++m)
    if (!grid.dealias_keeps(m)) spec[m] = 0.0;
}

/// Squared L2 norm (dx * sum |f|^2) computed from an unnormalized spectrum.
inline double spectral_l2_squared(std::span<const Complex> spec, const GridSpec& grid) {
  const std::size_t n = grid.size();
  double s = std::norm(spec[0]) + std::norm(spec[n / 2]);
  for (std::size_t m = 1; m < n / 2; ++m) s += 2.0 * std::norm(spec[m]);
  return grid.dx() * s / static_cast<double>(n);
}

// ---- operations ------------------------------------------------------------

inline Field derivative(const Field& f, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("derivative: order must be in [1, 4], got " + std::to_string(order));
  auto spec = to_spectrum(f);
  differentiate_in_place(spec, f.grid(), order);
  return from_spectrum(f.grid(), spec, f.time());
}

/// Pointwise product with 2/3-rule truncation of both factors and the result.
inline Field dealiased_product(const Field& f, const Field& g) {
  require_same_grid(f, g, "dealiased_product");
  const GridSpec& grid = f.grid();
  auto fs = to_spectrum(f);
  auto gs = to_spectrum(g);
  dealias_in_place(fs, grid);
  dealias_in_place(gs, grid);
  auto fp = fft::inverse(fs, static_cast<int>(grid.size()));
  auto gp = fft::inverse(gs, static_cast<int>(grid.size()));
  for (std::size_t j = 0; j < fp.size(); ++j) fp[j] *= gp[j];
  auto ps = fft::forward(fp);
  dealias_in_place(ps, grid);
  return from_spectrum(grid, ps, f.time());
}

inline double integral(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.grid().dx() * s;
}

inline double inner(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * g[j];
  return f.grid().dx() * s;
}

inline double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(f.grid().dx() * s, 1.0 / p);
}

inline double l2_norm(const Field& f) { return lp_norm(f, 2.0); }

inline double sup_norm(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

inline Field operator+(const Field& f, const Field& g) {
  require_same_grid(f, g, "operator+");
  std::vector<double> v(f.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f[j] + g[j];
  return Field(f.grid(), std::move(v), f.time());
}

inline Field operator-(const Field& f, const Field& g) {
  require_same_grid(f, g, "operator-");
  std::vector<double> v(f.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f[j] - g[j];
  return Field(f.grid(), std::move(v), f.time());
}

inline Field operator*(double a, const Field& f) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x *= a;
  return Field(f.grid(), std::move(v), f.time());
}

}  // namespace rkdv
