// rkdv_cli: run, sweep, analyze and report on diffusion-dispersion limits.
//
// Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 configuration error.

#include "rkdv/rkdv.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace rkdv;

struct Options {
  std::string config;
  std::string out;
  std::size_t workers = 1;
  std::string preset;
  double p_exponent = 0.0;
  std::string epsilons;
  std::vector<std::string> formats{"csv", "json", "gnuplot"};
};

ExperimentConfig resolve(const Options& o, bool fallback_to_stored = false) {
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    cfg = load_config(o.config);
  } else if (fallback_to_stored && !o.out.empty() && std::filesystem::exists(std::filesystem::path(o.out) / "config.cfg")) {
    cfg = load_config(std::filesystem::path(o.out) / "config.cfg");
  }
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.preset.empty()) set_config_value(cfg, "preset", o.preset);
  if (o.p_exponent != 0.0) set_config_value(cfg, "scaling.exponent", detail::format_double(o.p_exponent));
  if (!o.epsilons.empty()) set_config_value(cfg, "epsilons", o.epsilons);
  validate(cfg);
  return cfg;
}

void save_config(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out);
  std::ofstream(cfg.out / "config.cfg") << canonical_text(cfg);
}

void print_table(const ConvergenceReport& rep) {
  std::printf("%-10s %-12s %-10s %-8s %-12s %-12s %s\n", "epsilon", "beta", "status", "ledger", "linf_scaled",
              "entropy_min", "distances");
  for (const auto& r : rep.rows) {
    std::printf("%-10g %-12.4g %-10s %-8s %-12.5g %-12.4g", r.epsilon, r.beta, r.ok() ? "ok" : "FAILED",
                r.ledger_ok ? "bounded" : "NO", r.linf_scaled, r.entropy_min);
    for (const auto& [p, d] : r.distance) std::printf(" L%g=%.5g", p, d);
    std::printf("\n");
    if (!r.ok()) std::printf("    %s\n", r.status.c_str());
  }
  for (const auto& [p, fit] : rep.rates) {
    if (fit.fitted)
      std::printf("p=%g: slope %.4f (rms residual %.3g, %zu rows), %s\n", p, fit.slope, fit.residual, fit.used,
                  to_string(distance_verdict(rep, p)).c_str());
    else
      std::printf("p=%g: no fit (%zu usable rows)\n", p, fit.used);
  }
}

void emit_all(const ConvergenceReport& rep, const std::vector<std::string>& formats, const std::filesystem::path& dir) {
  for (const auto& f : formats) std::printf("wrote %s\n", emit(rep, report_format_from(f), dir).string().c_str());
}

int cmd_run(const Options& o) {
  const auto cfg = resolve(o);
  save_config(cfg);
  const double eps = cfg.epsilons.front();
  ConvergenceReport rep;
  rep.config_hash = config_hash(cfg);
  rep.preset = cfg.preset;
  rep.scaling_exponent = cfg.scaling_exponent;
  rep.rows.push_back(run_single(cfg, eps, cfg.path().beta(eps), build_reference(cfg), kruzkov_battery(cfg)));
  for (double p : cfg.lp) rep.rates[p] = RateFit{};
  print_table(rep);
  emit_all(rep, o.formats, cfg.out);
  return rep.rows.front().ok() && rep.rows.front().ledger_ok ? 0 : 1;
}

int cmd_sweep(const Options& o) {
  const auto cfg = resolve(o);
  save_config(cfg);
  const auto rep = run_sweep(cfg, o.workers);
  print_table(rep);
  emit_all(rep, o.formats, cfg.out);
  return sweep_passes(rep) ? 0 : 1;
}

int cmd_analyze(const Options& o) {
  const auto cfg = resolve(o, true);
  const auto rep = analyze_stored(cfg);
  print_table(rep);
  emit_all(rep, o.formats, cfg.out / "analysis");
  return sweep_passes(rep) ? 0 : 1;
}

int cmd_report(const Options& o) {
  const std::filesystem::path dir = o.out.empty() ? std::filesystem::path("rkdv_out") : std::filesystem::path(o.out);
  std::ifstream in(dir / "report.json");
  if (!in) throw ConfigError("no report.json in " + dir.string());
  const auto rep = report_from_json(nlohmann::json::parse(in));
  print_table(rep);
  emit_all(rep, o.formats, dir);
  return sweep_passes(rep) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion-dispersion limit lab for Rosenau-KdV type equations"};
  app.require_subcommand(1, 1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment config file (key = value)");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--workers", o.workers, "Concurrent sweep rows")->check(CLI::PositiveNumber);
    sub->add_option("--preset", o.preset, "Model preset override");
    sub->add_option("--p-exponent", o.p_exponent, "Scaling exponent p in beta = C eps^p")->check(CLI::PositiveNumber);
    sub->add_option("--epsilons", o.epsilons, "Comma separated, strictly decreasing eps list");
    sub->add_option("--format", o.formats, "Report formats: csv, json, gnuplot")
        ->check(CLI::IsMember({"csv", "json", "gnuplot"}));
  };
  auto* run = app.add_subcommand("run", "Integrate and evaluate the first eps of the config");
  auto* sweep = app.add_subcommand("sweep", "Run every eps along the scaling path");
  auto* analyze = app.add_subcommand("analyze", "Re-evaluate runs stored under <out>/runs");
  auto* report = app.add_subcommand("report", "Re-emit <out>/report.json in other formats");
  for (auto* s : {run, sweep, analyze, report}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*analyze) return cmd_analyze(o);
    return cmd_report(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
