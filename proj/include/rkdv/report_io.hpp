#pragma once

// Convergence report serialization: CSV (fixed columns, one line per row and
// exponent), JSON (complete, NaN as null) and gnuplot data blocks.

#include "rkdv/harness.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rkdv {

inline constexpr std::array<std::string_view, 16> kCsvColumns{
    "epsilon", "beta", "p",  "distance", "ledger_ok", "linf_scaled",  "I1",     "I2",
    "I3",      "I4",   "I5", "I6",       "entropy_min", "status",     "rate_slope", "rate_residual"};

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

inline nlohmann::json number_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline double json_number(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline nlohmann::json pmap_json(const std::map<double, double>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [p, v] : m) j[format_number(p)] = number_json(v);
  return j;
}

inline std::map<double, double> pmap_from(const nlohmann::json& j) {
  std::map<double, double> m;
  for (const auto& [k, v] : j.items()) m[parse_number(k)] = json_number(v);
  return m;
}

inline DatumCondition condition_from(const std::string& s) {
  for (auto c : {DatumCondition::smooth_h3, DatumCondition::smooth_h4, DatumCondition::bbm})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown datum condition '" + s + "'");
}

inline LedgerFamily family_from(const std::string& s) {
  for (auto f : kAllFamilies)
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown ledger family '" + s + "'");
}

}  // namespace detail

// ---- CSV --------------------------------------------------------------------

inline std::string to_csv(const ConvergenceReport& rep) {
  using detail::format_number;
  std::string s;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) s += (i ? "," : "") + std::string(kCsvColumns[i]);
  s += "\n";
  for (const auto& r : rep.rows) {
    std::vector<double> ps;
    for (const auto& [p, d] : r.distance) ps.push_back(p);
    if (ps.empty())
      for (const auto& [p, fit] : rep.rates) ps.push_back(p);
    for (double p : ps) {
      const auto d = r.distance.find(p);
      const auto fit = rep.rates.find(p);
      s += format_number(r.epsilon) + "," + format_number(r.beta) + "," + format_number(p) + ",";
      s += format_number(d == r.distance.end() ? std::numeric_limits<double>::quiet_NaN() : d->second) + ",";
      s += std::string(r.ledger_ok ? "1" : "0") + "," + format_number(r.linf_scaled);
      for (std::size_t k = 0; k < kResidualTerms; ++k) s += "," + format_number(r.residual_norm(k));
      s += "," + format_number(r.entropy_min) + "," + detail::csv_quote(r.status);
      s += "," + format_number(fit == rep.rates.end() ? std::numeric_limits<double>::quiet_NaN() : fit->second.slope);
      s += "," + format_number(fit == rep.rates.end() ? std::numeric_limits<double>::quiet_NaN() : fit->second.residual);
      s += "\n";
    }
  }
  return s;
}

/// Rebuilds the CSV-visible fields of a report.
inline ConvergenceReport report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("report CSV: missing header");
  const auto header = detail::csv_split(line);
  if (header.size() != kCsvColumns.size()) throw std::invalid_argument("report CSV: wrong column count in header");
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] != kCsvColumns[i]) throw std::invalid_argument("report CSV: unexpected column '" + header[i] + "'");
  ConvergenceReport rep;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != kCsvColumns.size())
      throw std::invalid_argument("report CSV line " + std::to_string(lineno) + ": wrong column count");
    auto num = [&](std::size_t i) { return detail::parse_number(f[i]); };
    const double eps = num(0), beta = num(1), p = num(2);
    if (rep.rows.empty() || rep.rows.back().epsilon != eps || rep.rows.back().beta != beta ||
        rep.rows.back().distance.count(p)) {
      RowResult r;
      r.epsilon = eps;
      r.beta = beta;
      r.ledger_ok = f[4] == "1";
      r.linf_scaled = num(5);
      for (std::size_t k = 0; k < kResidualTerms; ++k) {
        r.residual.hminus1[k] = std::numeric_limits<double>::quiet_NaN();
        (ResidualReport::divergence_term(k) ? r.residual.hminus1[k] : r.residual.l1[k]) = num(6 + k);
      }
      r.entropy_min = num(12);
      r.status = f[13];
      rep.rows.push_back(std::move(r));
    }
    rep.rows.back().distance[p] = num(3);
    RateFit fit;
    fit.slope = num(14);
    fit.residual = num(15);
    fit.fitted = std::isfinite(fit.slope);
    rep.rates[p] = fit;
  }
  return rep;
}

// ---- JSON -------------------------------------------------------------------

inline nlohmann::json to_json(const ConvergenceReport& rep) {
  using detail::number_json;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json datum = nlohmann::json::array();
    for (const auto& d : r.datum) {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : d.terms) terms.push_back({{"name", t.name}, {"value", number_json(t.value)}});
      datum.push_back({{"condition", to_string(d.condition)},
                       {"c0", number_json(d.c0)},
                       {"finite", d.finite},
                       {"terms", terms}});
    }
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& v : r.verdicts) {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : v.terms) terms.push_back({{"name", t.name}, {"sup", number_json(t.sup)}});
      verdicts.push_back({{"family", to_string(v.family)},
                          {"c0", number_json(v.c0)},
                          {"bound", number_json(v.bound)},
                          {"bounded", v.bounded},
                          {"drift", number_json(v.drift)},
                          {"terms", terms}});
    }
    nlohmann::json hm = nlohmann::json::array(), l1 = nlohmann::json::array();
    for (std::size_t k = 0; k < kResidualTerms; ++k) {
      hm.push_back(number_json(r.residual.hminus1[k]));
      l1.push_back(number_json(r.residual.l1[k]));
    }
    rows.push_back({{"epsilon", number_json(r.epsilon)},
                    {"beta", number_json(r.beta)},
                    {"status", r.status},
                    {"distance", detail::pmap_json(r.distance)},
                    {"spacetime_distance", detail::pmap_json(r.spacetime_distance)},
                    {"ledger_ok", r.ledger_ok},
                    {"linf_scaled", number_json(r.linf_scaled)},
                    {"energy_drift", number_json(r.energy_drift)},
                    {"residual",
                     {{"pair", r.residual.pair},
                      {"hminus1", hm},
                      {"l1", l1},
                      {"identity_weak", number_json(r.residual.identity_weak)},
                      {"identity_pointwise", number_json(r.residual.identity_pointwise)}}},
                    {"entropy_min", number_json(r.entropy_min)},
                    {"entropy_min_by_level", detail::pmap_json(r.entropy_min_by_level)},
                    {"datum", datum},
                    {"verdicts", verdicts},
                    {"steps", r.steps},
                    {"wall_seconds", number_json(r.wall_seconds)}});
  }
  nlohmann::json rates = nlohmann::json::array();
  for (const auto& [p, f] : rep.rates)
    rates.push_back({{"p", number_json(p)},
                     {"fitted", f.fitted},
                     {"slope", number_json(f.slope)},
                     {"residual", number_json(f.residual)},
                     {"used", f.used}});
  return {{"config_hash", rep.config_hash},
          {"version", rep.version},
          {"preset", rep.preset},
          {"scaling_exponent", number_json(rep.scaling_exponent)},
          {"wall_seconds", number_json(rep.wall_seconds)},
          {"rows", rows},
          {"rates", rates}};
}

inline ConvergenceReport report_from_json(const nlohmann::json& j) {
  using detail::json_number;
  ConvergenceReport rep;
  rep.config_hash = j.value("config_hash", "");
  rep.version = j.value("version", "");
  rep.preset = j.value("preset", "");
  rep.scaling_exponent = json_number(j.value("scaling_exponent", nlohmann::json(nullptr)));
  rep.wall_seconds = json_number(j.value("wall_seconds", nlohmann::json(nullptr)));
  for (const auto& r : j.at("rows")) {
    RowResult row;
    row.epsilon = json_number(r.at("epsilon"));
    row.beta = json_number(r.at("beta"));
    row.status = r.at("status").get<std::string>();
    row.distance = detail::pmap_from(r.at("distance"));
    row.spacetime_distance = detail::pmap_from(r.value("spacetime_distance", nlohmann::json::object()));
    row.ledger_ok = r.at("ledger_ok").get<bool>();
    row.linf_scaled = json_number(r.at("linf_scaled"));
    row.energy_drift = json_number(r.value("energy_drift", nlohmann::json(nullptr)));
    const auto& res = r.at("residual");
    row.residual.pair = res.value("pair", "");
    for (std::size_t k = 0; k < kResidualTerms; ++k) {
      row.residual.hminus1[k] = json_number(res.at("hminus1").at(k));
      row.residual.l1[k] = json_number(res.at("l1").at(k));
    }
    row.residual.identity_weak = json_number(res.value("identity_weak", nlohmann::json(nullptr)));
    row.residual.identity_pointwise = json_number(res.value("identity_pointwise", nlohmann::json(nullptr)));
    row.entropy_min = json_number(r.at("entropy_min"));
    row.entropy_min_by_level = detail::pmap_from(r.value("entropy_min_by_level", nlohmann::json::object()));
    for (const auto& d : r.value("datum", nlohmann::json::array())) {
      DatumReport dr;
      dr.condition = detail::condition_from(d.at("condition").get<std::string>());
      dr.c0 = json_number(d.at("c0"));
      dr.finite = d.at("finite").get<bool>();
      for (const auto& t : d.at("terms")) dr.terms.push_back({t.at("name").get<std::string>(), json_number(t.at("value"))});
      row.datum.push_back(std::move(dr));
    }
    for (const auto& v : r.value("verdicts", nlohmann::json::array())) {
      FamilyVerdict fv;
      fv.family = detail::family_from(v.at("family").get<std::string>());
      fv.c0 = json_number(v.at("c0"));
      fv.bound = json_number(v.at("bound"));
      fv.bounded = v.at("bounded").get<bool>();
      fv.drift = json_number(v.at("drift"));
      for (const auto& t : v.at("terms")) fv.terms.push_back({t.at("name").get<std::string>(), json_number(t.at("sup"))});
      row.verdicts.push_back(std::move(fv));
    }
    row.steps = r.value("steps", std::size_t{0});
    row.wall_seconds = json_number(r.value("wall_seconds", nlohmann::json(nullptr)));
    rep.rows.push_back(std::move(row));
  }
  for (const auto& f : j.value("rates", nlohmann::json::array())) {
    RateFit fit;
    fit.fitted = f.at("fitted").get<bool>();
    fit.slope = json_number(f.at("slope"));
    fit.residual = json_number(f.at("residual"));
    fit.used = f.value("used", std::size_t{0});
    rep.rates[json_number(f.at("p"))] = fit;
  }
  return rep;
}

// ---- gnuplot ----------------------------------------------------------------

/// One data block per exponent p (select with `index`), successful rows only.
inline std::string to_gnuplot(const ConvergenceReport& rep) {
  using detail::format_number;
  std::string s = "# preset " + rep.preset + ", beta = C eps^" + format_number(rep.scaling_exponent) + "\n";
  bool first = true;
  for (const auto& [p, fit] : rep.rates) {
    if (!first) s += "\n\n";
    first = false;
    s += "# p = " + format_number(p) + ", slope " + format_number(fit.slope) + "\n# epsilon beta distance\n";
    for (const auto& r : rep.rows) {
      const auto d = r.distance.find(p);
      if (!r.ok() || d == r.distance.end()) continue;
      s += format_number(r.epsilon) + " " + format_number(r.beta) + " " + format_number(d->second) + "\n";
    }
  }
  return s;
}

// ---- files ------------------------------------------------------------------

enum class ReportFormat { csv, json, gnuplot };

inline ReportFormat report_format_from(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "gnuplot") return ReportFormat::gnuplot;
  throw std::invalid_argument("unknown report format '" + s + "'");
}

/// Writes report.csv / report.json / report.dat into `dir`; returns the path.
inline std::filesystem::path emit(const ConvergenceReport& rep, ReportFormat format, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
  std::filesystem::path path;
  std::string body;
  switch (format) {
    case ReportFormat::csv:
      path = dir / "report.csv";
      body = to_csv(rep);
      break;
    case ReportFormat::json:
      path = dir / "report.json";
      body = to_json(rep).dump(2) + "\n";
      break;
    case ReportFormat::gnuplot:
      path = dir / "report.dat";
      body = to_gnuplot(rep);
      break;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return path;
}

}  // namespace rkdv
