#pragma once

// Stored space-time runs: ordered (u, du/dt) samples on one grid, persisted as
// field snapshots plus a JSON index.

#include "rkdv/ledger.hpp"
#include "rkdv/models.hpp"
#include "rkdv/snapshot.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace rkdv {

struct SpaceTimeRun {
  GridSpec grid{1.0, 16};
  ModelSpec model;
  std::vector<double> times;
  std::vector<Field> u;  // solution at each sample time
  std::vector<Field> v;  // du/dt at each sample time

  std::size_t size() const { return times.size(); }

  void append(const Field& uf, const Field& vf) {
    if (!(uf.grid() == grid) || !(vf.grid() == grid)) throw std::invalid_argument("SpaceTimeRun: grid mismatch");
    if (!times.empty() && !(uf.time() > times.back()))
      throw std::invalid_argument("SpaceTimeRun: sample times must be strictly increasing");
    times.push_back(uf.time());
    u.push_back(uf);
    v.push_back(vf.with_time(uf.time()));
  }
};

inline nlohmann::json to_json(const ModelSpec& m) {
  return nlohmann::json{{"label", m.label},
                        {"advection", m.advection},
                        {"nonlinearity", m.nonlinearity},
                        {"power", m.power},
                        {"dispersion", m.dispersion},
                        {"mixed_dispersion", m.mixed_dispersion},
                        {"higher_mixed", m.higher_mixed},
                        {"epsilon", m.epsilon},
                        {"beta", m.beta},
                        {"flux", m.flux == FluxConvention::square ? "u^2" : "u^2/2"},
                        {"form", m.form == NonlinearForm::skew ? "skew" : "conservative"}};
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
  ModelSpec m;
  m.label = j.at("label").get<std::string>();
  m.advection = j.at("advection").get<double>();
  m.nonlinearity = j.at("nonlinearity").get<double>();
  m.power = j.at("power").get<int>();
  m.dispersion = j.at("dispersion").get<double>();
  m.mixed_dispersion = j.at("mixed_dispersion").get<double>();
  m.higher_mixed = j.at("higher_mixed").get<double>();
  m.epsilon = j.at("epsilon").get<double>();
  m.beta = j.at("beta").get<double>();
  m.flux = j.at("flux").get<std::string>() == "u^2" ? FluxConvention::square : FluxConvention::half_square;
  m.form = j.at("form").get<std::string>() == "skew" ? NonlinearForm::skew : NonlinearForm::conservative;
  return m;
}

namespace detail {
inline std::string sample_name(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05zu.snap", prefix, i);
  return buf;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(is);
}
}  // namespace detail

/// Writes `dir/index.json` and one snapshot per stored field.
inline void save_run(const std::filesystem::path& dir, const SpaceTimeRun& run) {
  std::filesystem::create_directories(dir);
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < run.size(); ++i) {
    const auto un = detail::sample_name("u", i);
    const auto vn = detail::sample_name("v", i);
    write_snapshot(dir / un, run.u[i], flux_tag(run.model.flux));
    write_snapshot(dir / vn, run.v[i], flux_tag(run.model.flux));
    samples.push_back({{"t", run.times[i]}, {"u", un}, {"v", vn}});
  }
  nlohmann::json index{{"half_width", run.grid.half_width()},
                       {"n_points", run.grid.size()},
                       {"model", to_json(run.model)},
                       {"samples", samples}};
  detail::write_json(dir / "index.json", index);
}

inline SpaceTimeRun load_run(const std::filesystem::path& dir) {
  const auto index = detail::read_json(dir / "index.json");
  SpaceTimeRun run;
  run.grid = GridSpec(index.at("half_width").get<double>(), index.at("n_points").get<std::size_t>());
  run.model = model_from_json(index.at("model"));
  for (const auto& s : index.at("samples")) {
    auto u = read_snapshot(dir / s.at("u").get<std::string>()).field;
    auto v = read_snapshot(dir / s.at("v").get<std::string>()).field;
    run.append(u, v);
  }
  return run;
}

}  // namespace rkdv
