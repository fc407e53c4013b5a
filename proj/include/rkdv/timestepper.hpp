#pragma once

// Classical RK4 on du/dt = M^{-1} R(u), with running time integrals of the
// ledger norms accumulated from the stage values (same 1-2-2-1 weights as the
// solution update) and optional recording of the space-time trajectory.

#include "rkdv/ledger.hpp"
#include "rkdv/models.hpp"
#include "rkdv/run_store.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace rkdv {

struct StepperOptions {
  double cfl = 0.5;
  double stability = 2.5;  // RK4 reaches ~2.78 on the negative real axis
  double dt_max = std::numeric_limits<double>::infinity();
};

struct SolverState {
  ModelSpec model;
  Field u;
  StepperOptions options{};
  NormValues accumulators{};  // int_0^t ||.||^2 ds for each integrated series
  NormLedger ledger{};
  std::size_t step_count = 0;
  double next_sample = std::numeric_limits<double>::infinity();
  double sample_every = 0.0;
  bool record_fields = false;
  SpaceTimeRun trajectory{};

  double t() const { return u.time(); }

  /// Dissipation term 2 eps int_0^t ||u_x||^2 ds.
  double dissipation() const {
    auto it = accumulators.find(series::integral_name(series::ux_l2sq));
    return 2.0 * model.epsilon * (it == accumulators.end() ? 0.0 : it->second);
  }
};

/// Builds a state at the datum's time. The Nyquist coefficient of u0 is
/// dropped since it is never evolved.
inline SolverState make_state(const ModelSpec& model, const Field& u0, StepperOptions options = {},
                              bool record_fields = false) {
  auto spec = to_spectrum(u0);
  spec[u0.grid().size() / 2] = 0.0;
  SolverState s{model, from_spectrum(u0.grid(), spec, u0.time()), options};
  for (auto name : series::integrated) s.accumulators[series::integral_name(name)] = 0.0;
  s.record_fields = record_fields;
  s.trajectory.grid = u0.grid();
  s.trajectory.model = model;
  return s;
}

struct StepFailure {
  double t = 0.0;
  double dt = 0.0;
  std::string reason;
};

/// Outcome of stepping: the advanced state on success, the last good state
/// plus a failure record otherwise.
struct StepResult {
  SolverState state;
  std::optional<StepFailure> failure;
  bool ok() const { return !failure.has_value(); }
};

inline double max_stiff_symbol(const ModelSpec& m, const GridSpec& grid) {
  double worst = 0.0;
  for (std::size_t i = 0; i <= grid.size() / 2; ++i) {
    const double k = grid.mode_wavenumber(i);
    const double sym = std::abs(m.epsilon * k * k + std::abs(m.dispersion) * k * k * k) / sobolev_multiplier(m, k);
    worst = std::max(worst, sym);
  }
  return worst;
}

inline double suggest_dt(const SolverState& s) {
  const GridSpec& grid = s.u.grid();
  if (grid.size() == 0) throw std::invalid_argument("suggest_dt: empty grid");
  const double speed = std::max(1.0, 2.0 * std::abs(s.model.nonlinearity) * sup_norm(s.u) + std::abs(s.model.advection));
  double dt = s.options.cfl * grid.dx() / speed;
  const double stiff = max_stiff_symbol(s.model, grid);
  if (stiff > 0.0) dt = std::min(dt, s.options.stability / stiff);
  return std::min(dt, s.options.dt_max);
}

namespace detail {

inline bool all_finite(const Spectrum& s) {
  for (const auto& c : s)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

inline void record_sample(SolverState& s, const Spectrum& u_hat) {
  const GridSpec& grid = s.u.grid();
  const auto v_hat = velocity_spectrum(s.model, grid, u_hat);
  s.ledger.append(s.t(), compute_norms(grid, u_hat, v_hat), s.accumulators);
  if (s.record_fields) s.trajectory.append(s.u, from_spectrum(grid, v_hat, s.t()));
}

inline bool sample_due(const SolverState& s) {
  return s.t() >= s.next_sample - 1e-12 * std::max(1.0, std::abs(s.next_sample));
}

}  // namespace detail

/// One RK4 step. Throws std::invalid_argument when dt is nonpositive or
/// exceeds twice the suggested step; a non-finite result is reported as a
/// failure carrying the unmodified input state.
inline StepResult step(SolverState s, double dt, std::optional<double> land_on = std::nullopt) {
  const double limit = 2.0 * suggest_dt(s);
  if (!(dt > 0.0) || dt > limit) {
    std::ostringstream msg;
    msg << "step: dt = " << dt << " outside (0, " << limit << "]";
    throw std::invalid_argument(msg.str());
  }
  const GridSpec& grid = s.u.grid();
  const ModelSpec& m = s.model;
  const Spectrum u0 = to_spectrum(s.u);

  auto stage = [&](const Spectrum& base, const Spectrum* k, double h) {
    Spectrum out = base;
    if (k != nullptr)
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * (*k)[i];
    return out;
  };

  const Spectrum U1 = u0;
  const Spectrum K1 = velocity_spectrum(m, grid, U1);
  const Spectrum U2 = stage(u0, &K1, 0.5 * dt);
  const Spectrum K2 = velocity_spectrum(m, grid, U2);
  const Spectrum U3 = stage(u0, &K2, 0.5 * dt);
  const Spectrum K3 = velocity_spectrum(m, grid, U3);
  const Spectrum U4 = stage(u0, &K3, dt);
  const Spectrum K4 = velocity_spectrum(m, grid, U4);

  Spectrum next(u0.size());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] = u0[i] + dt / 6.0 * (K1[i] + 2.0 * K2[i] + 2.0 * K3[i] + K4[i]);

  auto values = fft::inverse(next, static_cast<int>(grid.size()));
  bool finite = detail::all_finite(next);
  for (double v : values) finite = finite && std::isfinite(v);
  if (!finite) {
    std::ostringstream msg;
    msg << "non-finite solution after step at t = " << s.t() << " with dt = " << dt << " (eps = " << m.epsilon
        << ", beta = " << m.beta << ")";
    const double t = s.t();
    return StepResult{std::move(s), StepFailure{t, dt, msg.str()}};
  }

  const NormValues g1 = compute_norms(grid, U1, K1, true);
  const NormValues g2 = compute_norms(grid, U2, K2, true);
  const NormValues g3 = compute_norms(grid, U3, K3, true);
  const NormValues g4 = compute_norms(grid, U4, K4, true);
  for (auto name : series::integrated) {
    const std::string key(name);
    const double inc = dt / 6.0 * (g1.at(key) + 2.0 * g2.at(key) + 2.0 * g3.at(key) + g4.at(key));
    s.accumulators[series::integral_name(name)] += inc;
  }

  const double t_new = land_on.value_or(s.t() + dt);
  s.u = Field(grid, std::move(values), t_new);
  ++s.step_count;

  if (detail::sample_due(s)) {
    detail::record_sample(s, next);
    s.next_sample += s.sample_every;
  }
  return StepResult{std::move(s), std::nullopt};
}

/// Steps to `T`, landing exactly on every multiple of `sample_every` past the
/// current time and on T itself, where ledger samples are taken.
inline StepResult integrate_to(SolverState s, double T, double sample_every) {
  const double t0 = s.t();
  if (T == t0) return StepResult{std::move(s), std::nullopt};
  if (!(T > t0)) throw std::invalid_argument("integrate_to: target time precedes current time");
  if (!(sample_every > 0.0)) throw std::invalid_argument("integrate_to: sample cadence must be positive");

  if (s.ledger.empty() || s.ledger.times().back() < t0) detail::record_sample(s, to_spectrum(s.u));
  s.sample_every = sample_every;
  s.next_sample = std::min(t0 + sample_every, T);
  const double tiny = 1e-13 * std::max(1.0, std::abs(T));

  std::size_t sample_index = 1;
  while (s.t() < T - tiny) {
    const double target = std::min(t0 + static_cast<double>(sample_index) * sample_every, T);
    s.next_sample = target;
    while (s.t() < target - tiny) {
      const double dt_cfl = suggest_dt(s);
      const double remaining = target - s.t();
      double dt = dt_cfl;
      std::optional<double> land;
      if (remaining <= dt_cfl * (1.0 + 1e-12)) {
        dt = remaining;
        land = target;
      } else if (remaining < 2.0 * dt_cfl) {
        dt = 0.5 * remaining;  // avoid a sliver step before the target
      }
      auto r = step(std::move(s), dt, land);
      if (!r.ok()) return r;
      s = std::move(r.state);
    }
    ++sample_index;
  }
  return StepResult{std::move(s), std::nullopt};
}

/// Checkpoint: `dir/state.snap` plus `dir/state.json` with the model,
/// accumulators and step count. The ledger is not part of a checkpoint.
inline void save_checkpoint(const std::filesystem::path& dir, const SolverState& s) {
  std::filesystem::create_directories(dir);
  write_snapshot(dir / "state.snap", s.u, flux_tag(s.model.flux));
  nlohmann::json j{{"model", to_json(s.model)},
                   {"accumulators", s.accumulators},
                   {"step_count", s.step_count},
                   {"options", {{"cfl", s.options.cfl}, {"stability", s.options.stability}}}};
  if (std::isfinite(s.options.dt_max)) j["options"]["dt_max"] = s.options.dt_max;
  detail::write_json(dir / "state.json", j);
}

inline SolverState load_checkpoint(const std::filesystem::path& dir) {
  const auto j = detail::read_json(dir / "state.json");
  StepperOptions opt;
  opt.cfl = j.at("options").at("cfl").get<double>();
  opt.stability = j.at("options").at("stability").get<double>();
  if (j.at("options").contains("dt_max")) opt.dt_max = j.at("options").at("dt_max").get<double>();
  SolverState s{model_from_json(j.at("model")), read_snapshot(dir / "state.snap").field, opt};
  for (const auto& [k, v] : j.at("accumulators").items()) s.accumulators[k] = v.get<double>();
  s.step_count = j.at("step_count").get<std::size_t>();
  s.trajectory.grid = s.u.grid();
  s.trajectory.model = s.model;
  return s;
}

}  // namespace rkdv
