#pragma once

// Initial data families and the scaled initial-norm conditions that set the
// per-run constant C0.

#include "rkdv/burgers.hpp"
#include "rkdv/grid.hpp"
#include "rkdv/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace rkdv {

enum class DatumFamily { zero, gaussian, riemann };

struct DatumSpec {
  DatumFamily family = DatumFamily::riemann;
  // gaussian: A exp(-((x - center)/sigma)^2)
  double amplitude = 0.5;
  double sigma = 2.0;
  double center = 0.0;
  // riemann: plateau uL on [left_edge, jump), uR elsewhere, smoothed by tanh of width w
  double u_left = 1.0;
  double u_right = 0.0;
  double left_edge = -0.75;  // in units of L
  double jump = 0.0;
  double width = 0.0;        // <= 0 selects max(2 dx, eps)
};

inline std::string to_string(DatumFamily f) {
  switch (f) {
    case DatumFamily::zero: return "zero";
    case DatumFamily::gaussian: return "gaussian";
    case DatumFamily::riemann: return "riemann";
  }
  return "?";
}

inline DatumFamily datum_family_from(const std::string& s) {
  if (s == "zero") return DatumFamily::zero;
  if (s == "gaussian") return DatumFamily::gaussian;
  if (s == "riemann") return DatumFamily::riemann;
  throw std::invalid_argument("unknown datum family '" + s + "'");
}

inline double smoothing_width(const DatumSpec& d, const GridSpec& grid, double eps) {
  return d.width > 0.0 ? d.width : std::max(2.0 * grid.dx(), eps);
}

/// Datum on the spectral grid for diffusion eps.
inline Field make_datum(const DatumSpec& d, const GridSpec& grid, double eps) {
  const double L = grid.half_width();
  switch (d.family) {
    case DatumFamily::zero: return Field::zeros(grid);
    case DatumFamily::gaussian:
      return Field::from_function(grid, [&](double x) {
        const double z = (x - d.center) / d.sigma;
        return d.amplitude * std::exp(-z * z);
      });
    case DatumFamily::riemann: {
      const double w = smoothing_width(d, grid, eps);
      const double a = d.left_edge * L;
      return Field::from_function(grid, [&](double x) {
        return d.u_right + (d.u_left - d.u_right) * 0.5 * (std::tanh((x - a) / w) - std::tanh((x - d.jump) / w));
      });
    }
  }
  throw std::logic_error("make_datum: bad family");
}

/// Limit datum (eps -> 0) as cell averages on an FV grid of M cells.
inline FvGrid reference_datum(const DatumSpec& d, double half_width, std::size_t cells, FluxConvention fc) {
  switch (d.family) {
    case DatumFamily::zero: return FvGrid(half_width, std::vector<double>(cells, 0.0), fc);
    case DatumFamily::gaussian:
      return cell_averages(
          half_width, cells,
          [&](double x) {
            const double z = (x - d.center) / d.sigma;
            return d.amplitude * std::exp(-z * z);
          },
          fc);
    case DatumFamily::riemann:
      return plateau_cells(half_width, cells, d.u_left, d.u_right, d.left_edge * half_width, d.jump, fc);
  }
  throw std::logic_error("reference_datum: bad family");
}

enum class DatumCondition { smooth_h3, smooth_h4, bbm };

inline std::string to_string(DatumCondition c) {
  switch (c) {
    case DatumCondition::smooth_h3: return "h3";
    case DatumCondition::smooth_h4: return "h4";
    case DatumCondition::bbm: return "bbm";
  }
  return "?";
}

struct DatumTerm {
  std::string name;
  double value = 0.0;
};

struct DatumReport {
  DatumCondition condition = DatumCondition::smooth_h3;
  std::vector<DatumTerm> terms;
  double c0 = 0.0;
  bool finite = true;
};

/// Scaled initial norms of the selected condition; C0 is their maximum.
inline DatumReport initial_datum_conditions(const Field& u0, double eps, double beta, DatumCondition which) {
  const GridSpec& grid = u0.grid();
  const auto spec = to_spectrum(u0);
  auto d = [&](int order) { return derivative_l2_squared(spec, grid, order); };
  const double sb = std::sqrt(beta), e2 = eps * eps;
  DatumReport r;
  r.condition = which;
  switch (which) {
    case DatumCondition::smooth_h3:
      r.terms = {{"u_l2sq + (beta^1/2 + eps^2) ux_l2sq", d(0) + (sb + e2) * d(1)},
                 {"(beta^2 + beta eps^2) uxx_l2sq", (beta * beta + beta * e2) * d(2)},
                 {"beta^5/2 uxxx_l2sq", beta * beta * sb * d(3)}};
      break;
    case DatumCondition::smooth_h4: {
      double l4 = 0.0;
      for (double v : u0.values()) l4 += v * v * v * v;
      l4 *= grid.dx();
      r.terms = {{"u_l4p4 + u_l2sq + (beta^1/2 + eps^2) ux_l2sq", l4 + d(0) + (sb + e2) * d(1)},
                 {"(beta^2 + beta eps^2) uxx_l2sq", (beta * beta + beta * e2) * d(2)},
                 {"(beta^5/2 + beta^2 eps^2) uxxx_l2sq", (beta * beta * sb + beta * beta * e2) * d(3)},
                 {"beta^4 uxxxx_l2sq", beta * beta * beta * beta * d(4)}};
      break;
    }
    case DatumCondition::bbm:
      r.terms = {{"u_l2sq + (beta + beta^1/2) ux_l2sq", d(0) + (beta + sb) * d(1)},
                 {"(beta^3/2 + beta eps^2) uxx_l2sq", (beta * sb + beta * e2) * d(2)}};
      break;
  }
  for (const auto& t : r.terms) {
    r.finite = r.finite && std::isfinite(t.value);
    r.c0 = std::max(r.c0, t.value);
  }
  return r;
}

}  // namespace rkdv
