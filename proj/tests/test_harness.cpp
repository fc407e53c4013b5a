#include "rkdv/harness.hpp"
#include "rkdv/report_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace rkdv;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.points = 256;
  c.final_time = 0.5;
  c.sample_every = 0.05;
  c.epsilons = {0.4, 0.2, 0.1};
  return c;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("rkdv_harness_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

// ---- rate fit --------------------------------------------------------------

TEST(EstimateRate, ExactGeometric) {
  const auto r = estimate_rate({0.2, 0.1, 0.05}, {0.4, 0.2, 0.1});
  ASSERT_TRUE(r.fitted);
  EXPECT_NEAR(r.slope, 1.0, 1e-12);
  EXPECT_NEAR(r.residual, 0.0, 1e-12);
}

TEST(EstimateRate, EqualDistancesGiveZero) {
  const auto r = estimate_rate({0.2, 0.1, 0.05, 0.025}, {0.3, 0.3, 0.3, 0.3});
  ASSERT_TRUE(r.fitted);
  EXPECT_NEAR(r.slope, 0.0, 1e-12);
}

TEST(EstimateRate, NoisyHalfPower) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<double> eps, d;
  for (double e = 0.2; e > 1e-3; e /= 2) {
    eps.push_back(e);
    d.push_back(3.0 * std::sqrt(e) * (1.0 + noise(rng)));
  }
  const auto r = estimate_rate(eps, d);
  ASSERT_TRUE(r.fitted);
  EXPECT_NEAR(r.slope, 0.5, 0.05);
}

TEST(EstimateRate, TooFewRowsNoFit) {
  EXPECT_FALSE(estimate_rate({0.2, 0.1}, {0.4, 0.2}).fitted);
  const auto r = estimate_rate({0.2, 0.1, 0.05}, {0.4, std::nan(""), 0.1});
  EXPECT_FALSE(r.fitted);
  EXPECT_EQ(r.used, 2u);
  EXPECT_TRUE(std::isnan(r.slope));
}

// ---- configuration ---------------------------------------------------------

TEST(Config, ParsesKeysAndComments) {
  const auto c = parse_config_text(
      "# comment\npoints = 512   # trailing\npreset = kdv\nepsilons = 0.3, 0.2,0.1\nwindow = -2, 3\n"
      "datum = gaussian\ndatum.sigma = 1.5\nstore_runs = yes\n");
  EXPECT_EQ(c.points, 512u);
  EXPECT_EQ(c.preset, "kdv");
  EXPECT_EQ(c.epsilons, (std::vector<double>{0.3, 0.2, 0.1}));
  EXPECT_EQ(c.window.lo, -2.0);
  EXPECT_EQ(c.datum.family, DatumFamily::gaussian);
  EXPECT_EQ(c.datum.sigma, 1.5);
  EXPECT_TRUE(c.store_runs);
}

TEST(Config, Rejections) {
  for (const char* bad : {"nope = 1\n", "points = 500\n", "epsilons = 0.1, 0.2, 0.05\n", "epsilons = 0.2, 0.2, 0.1\n",
                          "window = -20, 1\n", "refinement = 3\n", "points = abc\n", "preset = heat\n",
                          "lp = 1, 4\n", "final_time = 1\nsample_every = 0.3\n", "just a line\n", "datum = square\n"})
    EXPECT_THROW(parse_config_text(bad), ConfigError) << bad;
}

TEST(Config, CanonicalTextRoundTrip) {
  auto c = small_config();
  c.scaling_exponent = 5.0;
  const auto back = parse_config_text(canonical_text(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(canonical_text(back), canonical_text(c));
  auto d = c;
  d.epsilons.back() = 0.11;
  EXPECT_NE(config_hash(d), config_hash(c));
}

TEST(Config, DefaultFileMatchesBuiltins) {
  const auto c = load_config(std::filesystem::path(RKDV_SOURCE_DIR) / "configs" / "default.cfg");
  EXPECT_EQ(canonical_text(c), canonical_text(ExperimentConfig{}));
}

// ---- runs and sweeps -------------------------------------------------------

TEST(RunSingle, ZeroDatumTriviallyBounded) {
  auto c = small_config();
  c.datum.family = DatumFamily::zero;
  const auto row = run_single(c, 0.1, 1e-4, build_reference(c), kruzkov_battery(c));
  ASSERT_TRUE(row.ok()) << row.status;
  EXPECT_TRUE(row.ledger_ok);
  for (const auto& v : row.verdicts)
    for (const auto& t : v.terms) EXPECT_EQ(t.sup, 0.0);
  for (const auto& [p, d] : row.distance) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(row.linf_scaled, 0.0);
  EXPECT_LE(std::abs(row.entropy_min), 1e-12);
}

TEST(RunSingle, GaussianEnergyLawFromStoredLedger) {
  ExperimentConfig c;
  c.points = 512;
  c.datum.family = DatumFamily::gaussian;
  c.sample_every = 0.05;
  c.store_runs = true;
  c.out = temp_dir("gaussian");
  const double eps = 0.1, beta = std::pow(eps, 4);
  const auto row = run_single(c, eps, beta, build_reference(c), kruzkov_battery(c), 0);
  ASSERT_TRUE(row.ok()) << row.status;
  EXPECT_TRUE(row.ledger_ok);

  const auto dir = c.out / "runs" / row_directory_name(0, eps);
  const auto L = ledger_from_json(detail::read_json(dir / "ledger.json"));
  ASSERT_EQ(L.size(), 21u);
  const auto& u = L.get("u_l2sq");
  const auto& uxx = L.get("uxx_l2sq");
  const auto& iux = L.get("int_ux_l2sq");
  const double q0 = u[0] + beta * beta * uxx[0];
  for (std::size_t i = 0; i < L.size(); ++i) EXPECT_LE(std::abs(u[i] + beta * beta * uxx[i] + 2 * eps * iux[i] - q0) / q0, 1e-6);
  EXPECT_LE(row.energy_drift, 1e-6);

  const auto run = load_run(dir);
  EXPECT_EQ(run.size(), 21u);
  EXPECT_EQ(run.model.epsilon, eps);
  std::filesystem::remove_all(c.out);
}

TEST(RunSingle, InstabilityBecomesFailedRow) {
  auto c = small_config();
  c.preset = "kdv";
  c.points = 1024;
  c.stepper.cfl = 1e9;
  c.stepper.stability = 1e9;
  c.stepper.dt_max = 0.05;
  const auto row = run_single(c, 0.4, 0.0256, build_reference(c), kruzkov_battery(c));
  EXPECT_FALSE(row.ok());
  EXPECT_NE(row.status.find("non-finite"), std::string::npos) << row.status;
  EXPECT_FALSE(row.ledger_ok);
}

TEST(RunSweep, NeedsThreeEpsilons) {
  auto c = small_config();
  c.epsilons = {0.2, 0.1};
  EXPECT_THROW(run_sweep(c), ConfigError);
  c.epsilons = {0.2, 0.2, 0.1};
  EXPECT_THROW(run_sweep(c), ConfigError);
}

TEST(RunSweep, DeterministicAcrossWorkersAndRowRemoval) {
  const auto c = small_config();
  const auto a = run_sweep(c, 1);
  const auto b = run_sweep(c, 3);
  ASSERT_EQ(a.rows.size(), 3u);
  EXPECT_EQ(to_csv(a), to_csv(b));
  for (std::size_t i = 1; i < a.rows.size(); ++i) EXPECT_GT(a.rows[i - 1].epsilon, a.rows[i].epsilon);

  auto fewer = c;
  fewer.epsilons = {0.4, 0.1, 0.05};
  const auto f = run_sweep(fewer, 2);
  for (double p : c.lp) {
    EXPECT_EQ(f.rows[0].distance.at(p), a.rows[0].distance.at(p));
    EXPECT_EQ(f.rows[1].distance.at(p), a.rows[2].distance.at(p));
  }
  EXPECT_EQ(f.rows[1].entropy_min, a.rows[2].entropy_min);
}

TEST(RunSweep, ReferenceIndependentOfEpsilons) {
  auto c = small_config();
  const auto r1 = build_reference(c);
  c.epsilons = {0.9, 0.5, 0.3, 0.01};
  c.scaling_exponent = 5;
  const auto r2 = build_reference(c);
  ASSERT_EQ(r1.fields.size(), r2.fields.size());
  for (std::size_t n = 0; n < r1.fields.size(); ++n)
    for (std::size_t j = 0; j < r1.grid.size(); ++j) EXPECT_EQ(r1.fields[n][j], r2.fields[n][j]);
}

TEST(RunSweep, AnalyzeStoredReproducesDistances) {
  auto c = small_config();
  c.store_runs = true;
  c.out = temp_dir("analyze");
  const auto a = run_sweep(c, 1);
  const auto b = analyze_stored(c);
  ASSERT_EQ(b.rows.size(), a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(b.rows[i].epsilon, a.rows[i].epsilon);
    for (double p : c.lp) EXPECT_EQ(b.rows[i].distance.at(p), a.rows[i].distance.at(p));
    EXPECT_EQ(b.rows[i].ledger_ok, a.rows[i].ledger_ok);
  }
  std::filesystem::remove_all(c.out);
}

// ---- verdicts --------------------------------------------------------------

TEST(Verdict, StrictWeakAndFail) {
  auto make = [](std::vector<double> d) {
    ConvergenceReport r;
    std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
    for (std::size_t i = 0; i < d.size(); ++i) {
      RowResult row;
      row.epsilon = eps[i];
      row.distance[1.0] = d[i];
      row.ledger_ok = true;
      r.rows.push_back(row);
    }
    r.rates[1.0] = estimate_rate(eps, d);
    return r;
  };
  EXPECT_EQ(distance_verdict(make({0.4, 0.2, 0.1, 0.05}), 1.0), SweepVerdict::pass);
  EXPECT_TRUE(sweep_passes(make({0.4, 0.2, 0.1, 0.05})));
  EXPECT_EQ(distance_verdict(make({0.4, 0.2, 0.25, 0.05}), 1.0), SweepVerdict::weak_pass);
  EXPECT_EQ(distance_verdict(make({0.1, 0.2, 0.3, 0.4}), 1.0), SweepVerdict::fail);
  auto failed = make({0.4, 0.2, 0.1, 0.05});
  failed.rows[2].status = "failed: non-finite";
  EXPECT_EQ(distance_verdict(failed, 1.0), SweepVerdict::fail);
  EXPECT_FALSE(sweep_passes(failed));
}
