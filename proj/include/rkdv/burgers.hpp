#pragma once

// First-order Godunov scheme for u_t + f(u)_x = 0 with f = u^2 or u^2/2 on a
// periodic box, plus exact Riemann solutions.

#include "rkdv/grid.hpp"
#include "rkdv/models.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rkdv {

/// Cell averages on [-L, L) with M equal cells; cell i is [-L + i h, -L + (i+1) h).
class FvGrid {
 public:
  FvGrid(double half_width, std::vector<double> averages, FluxConvention flux, double t = 0.0)
      : half_width_(half_width), u_(std::move(averages)), flux_(flux), t_(t) {
    if (!(half_width > 0.0)) throw std::invalid_argument("FvGrid: half width must be positive");
    if (u_.size() < 4) throw std::invalid_argument("FvGrid: need at least 4 cells");
    for (std::size_t i = 0; i < u_.size(); ++i)
      if (!std::isfinite(u_[i])) throw std::invalid_argument("FvGrid: non-finite average in cell " + std::to_string(i));
  }

  double half_width() const { return half_width_; }
  std::size_t cells() const { return u_.size(); }
  double dx() const { return 2.0 * half_width_ / static_cast<double>(u_.size()); }
  double center(std::size_t i) const { return -half_width_ + (static_cast<double>(i) + 0.5) * dx(); }
  double time() const { return t_; }
  FluxConvention flux() const { return flux_; }
  const std::vector<double>& values() const { return u_; }
  double operator[](std::size_t i) const { return u_[i]; }

  double mass() const {
    double s = 0.0;
    for (double v : u_) s += v;
    return dx() * s;
  }

  FvGrid advanced(std::vector<double> u, double dt) const { return FvGrid(half_width_, std::move(u), flux_, t_ + dt); }

 private:
  double half_width_;
  std::vector<double> u_;
  FluxConvention flux_;
  double t_;
};

/// Godunov flux for a convex flux with its minimum at u = 0.
inline double godunov_flux(double uL, double uR, FluxConvention fc) {
  return std::max(flux_value(fc, std::max(uL, 0.0)), flux_value(fc, std::min(uR, 0.0)));
}

inline double max_wave_speed(const FvGrid& g) {
  double s = 0.0;
  for (double v : g.values()) s = std::max(s, std::abs(flux_derivative(g.flux(), v)));
  return s;
}

/// One conservative step. Throws if dt violates the CFL condition.
inline FvGrid godunov_step(const FvGrid& g, double dt) {
  const double h = g.dx();
  const double cfl = dt * max_wave_speed(g) / h;
  if (!(dt > 0.0) || cfl > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "godunov_step: dt = " << dt << " gives CFL number " << cfl << " > 1";
    throw std::invalid_argument(msg.str());
  }
  const auto& u = g.values();
  const std::size_t m = u.size();
  std::vector<double> F(m);  // F[i] at the left face of cell i
  for (std::size_t i = 0; i < m; ++i) F[i] = godunov_flux(u[(i + m - 1) % m], u[i], g.flux());
  std::vector<double> next(m);
  const double r = dt / h;
  for (std::size_t i = 0; i < m; ++i) next[i] = u[i] - r * (F[(i + 1) % m] - F[i]);
  return g.advanced(std::move(next), dt);
}

/// Steps to T at the given CFL number, landing on T and on every requested
/// output time. Returns the states at the output times (T last).
inline std::vector<FvGrid> evolve(FvGrid g, double T, std::vector<double> outputs = {}, double cfl = 0.9) {
  if (!(T >= g.time())) throw std::invalid_argument("evolve: target time precedes current time");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("evolve: CFL number must lie in (0, 1]");
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::remove_if(outputs.begin(), outputs.end(), [&](double t) { return t <= g.time() || t >= T; }),
                outputs.end());
  outputs.push_back(T);

  std::vector<FvGrid> out;
  for (double target : outputs) {
    while (g.time() < target) {
      const double speed = max_wave_speed(g);
      double dt = speed > 0.0 ? cfl * g.dx() / speed : target - g.time();
      if (g.time() + dt >= target) {
        g = godunov_step(g, target - g.time());
        g = FvGrid(g.half_width(), g.values(), g.flux(), target);
      } else {
        g = godunov_step(g, dt);
      }
    }
    out.push_back(g);
  }
  return out;
}

/// Entropy solution of the Riemann problem at (t, x).
inline double riemann_exact(double uL, double uR, FluxConvention fc, double t, double x) {
  if (!(t > 0.0)) throw std::invalid_argument("riemann_exact: t must be positive");
  const double c = fc == FluxConvention::square ? 2.0 : 1.0;  // f'(u) = c u
  if (uL > uR) {
    const double s = 0.5 * c * (uL + uR);
    return x < s * t ? uL : uR;
  }
  if (x <= c * uL * t) return uL;
  if (x >= c * uR * t) return uR;
  return x / (c * t);
}

inline double total_variation(const std::vector<double>& u) {
  double tv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) tv += std::abs(u[(i + 1) % u.size()] - u[i]);
  return tv;
}

/// Exact cell averages of the periodic plateau u = uL on [a, b), uR elsewhere.
inline FvGrid plateau_cells(double half_width, std::size_t cells, double uL, double uR, double a, double b,
                            FluxConvention fc) {
  if (!(a < b) || a < -half_width || b > half_width)
    throw std::invalid_argument("plateau_cells: need -L <= a < b <= L");
  const double h = 2.0 * half_width / static_cast<double>(cells);
  std::vector<double> u(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double lo = -half_width + static_cast<double>(i) * h;
    const double overlap = std::max(0.0, std::min(lo + h, b) - std::max(lo, a));
    u[i] = uR + (uL - uR) * overlap / h;
  }
  return FvGrid(half_width, std::move(u), fc);
}

/// Cell averages of a smooth function by 10-point Gauss-Legendre per cell.
template <class F>
FvGrid cell_averages(double half_width, std::size_t cells, F&& f, FluxConvention fc) {
  using boost::math::quadrature::gauss;
  const double h = 2.0 * half_width / static_cast<double>(cells);
  std::vector<double> u(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double lo = -half_width + static_cast<double>(i) * h;
    u[i] = gauss<double, 10>::integrate(f, lo, lo + h) / h;
  }
  return FvGrid(half_width, std::move(u), fc);
}

/// Conservative average of the FV solution over each spectral cell
/// [x_j - dx/2, x_j + dx/2], wrapping periodically.
inline Field resample_to(const FvGrid& g, const GridSpec& grid) {
  if (std::abs(g.half_width() - grid.half_width()) > 1e-12 * grid.half_width())
    throw std::invalid_argument("resample_to: boxes differ");
  const double h = g.dx();
  const double dx = grid.dx();
  const auto m = static_cast<long>(g.cells());
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double lo = grid.x(j) - 0.5 * dx;
    const double hi = lo + dx;
    const long first = static_cast<long>(std::floor((lo + g.half_width()) / h));
    const long last = static_cast<long>(std::ceil((hi + g.half_width()) / h));
    double acc = 0.0;
    for (long i = first; i < last; ++i) {
      const double clo = -g.half_width() + static_cast<double>(i) * h;
      const double overlap = std::min(clo + h, hi) - std::max(clo, lo);
      if (overlap <= 0.0) continue;
      const long wrapped = ((i % m) + m) % m;
      acc += overlap * g[static_cast<std::size_t>(wrapped)];
    }
    out[j] = acc / dx;
  }
  return Field(grid, std::move(out), g.time());
}

}  // namespace rkdv
