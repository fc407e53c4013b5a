#include "rkdv/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace rkdv;

namespace {

constexpr double pi = std::numbers::pi;

Field random_smooth(const GridSpec& g, std::uint64_t seed, int modes = 16) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> a(modes), b(modes);
  for (int m = 0; m < modes; ++m) {
    a[m] = nd(rng) / (1 + m);
    b[m] = nd(rng) / (1 + m);
  }
  return Field::from_function(g, [&](double x) {
    double s = 0.0;
    for (int m = 0; m < modes; ++m) {
      const double k = pi * (m + 1) / g.half_width();
      s += a[m] * std::cos(k * x) + b[m] * std::sin(k * x);
    }
    return s;
  });
}

}  // namespace

TEST(Presets, Coefficients) {
  const auto r = make_preset("rosenau_kdv_reg", 0.1, 0.2);
  EXPECT_DOUBLE_EQ(r.dispersion, 0.1);
  EXPECT_DOUBLE_EQ(r.higher_mixed, 0.01);
  EXPECT_DOUBLE_EQ(r.mixed_dispersion, 0.0);
  EXPECT_DOUBLE_EQ(r.epsilon, 0.2);
  EXPECT_EQ(r.flux, FluxConvention::square);

  const auto b = make_preset("bbm_reg", 0.5, 0.0);
  EXPECT_DOUBLE_EQ(b.mixed_dispersion, -0.5);
  EXPECT_EQ(b.flux, FluxConvention::half_square);

  EXPECT_THROW(make_preset("nope", 0.1, 0.1), std::invalid_argument);
  EXPECT_THROW(make_preset("kdv", -0.1, 0.1), std::invalid_argument);
  for (auto name : kPresetNames) EXPECT_TRUE(is_preset_name(name));
}

TEST(SobolevMultiplier, Examples) {
  EXPECT_DOUBLE_EQ(sobolev_multiplier(make_preset("rosenau", 1.0, 0.0), 1.0), 2.0);
  EXPECT_DOUBLE_EQ(sobolev_multiplier(make_preset("bbm_reg", 0.5, 0.0), 2.0), 3.0);
  const double beta = 0.1, k = 3.0;
  EXPECT_NEAR(sobolev_multiplier(make_preset("rosenau_rlw", beta, 0.0), k), 1 + beta * k * k + beta * beta * k * k * k * k,
              1e-14);
}

TEST(SobolevMultiplier, AtLeastOneOnPresets) {
  for (auto name : kPresetNames)
    for (double beta : {0.0, 1e-4, 0.1, 0.5, 1.0})
      for (double k = 0.0; k < 200.0; k += 0.37) EXPECT_GE(sobolev_multiplier(make_preset(name, beta, 0.1), k), 1.0);
}

TEST(ScalingPath, Rules) {
  ScalingPath p(1.0, 4.0);
  EXPECT_NEAR(p.beta(0.1), 1e-4, 1e-18);
  EXPECT_FALSE(p.little_o());
  EXPECT_TRUE(ScalingPath(2.0, 5.0).little_o());
  EXPECT_THROW(ScalingPath(0.0, 4.0), std::invalid_argument);
}

TEST(ExplicitRhs, ConstantGivesZero) {
  GridSpec g(pi, 32);
  const auto u = Field::from_function(g, [](double) { return 3.0; });
  for (auto name : kPresetNames) EXPECT_LT(sup_norm(explicit_rhs(make_preset(name, 0.3, 0.2), u)), 1e-12) << name;
}

TEST(ExplicitRhs, BurgersTermOracle) {
  GridSpec g(pi, 64);
  const auto u = Field::from_function(g, [](double x) { return std::sin(x); });
  const auto r = explicit_rhs(make_preset("rosenau_kdv_reg", 0.0, 0.0), u);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(r[j], -std::sin(2 * g.x(j)), 1e-8);
}

TEST(ExplicitRhs, KdvOracle) {
  GridSpec g(pi, 64);
  const auto u = Field::from_function(g, [](double x) { return std::sin(x); });
  const auto r = explicit_rhs(make_preset("kdv", 1.0, 0.0), u);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(r[j], -std::sin(2 * g.x(j)) + std::cos(g.x(j)), 1e-8);
}

TEST(ExplicitRhs, BbmHalfFlux) {
  GridSpec g(pi, 64);
  const auto u = Field::from_function(g, [](double x) { return std::sin(x); });
  const auto r = explicit_rhs(make_preset("bbm_reg", 0.0, 0.0), u);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(r[j], -0.5 * std::sin(2 * g.x(j)), 1e-8);
}

TEST(ExplicitRhs, PowerOtherThanTwoRejected) {
  GridSpec g(pi, 16);
  auto m = make_preset("kdv", 1.0, 0.0);
  m.power = 3;
  EXPECT_THROW(explicit_rhs(m, Field::zeros(g)), std::invalid_argument);
}

TEST(ExplicitRhs, ConservativeFormAgreesOnResolvedData) {
  GridSpec g(pi, 64);
  const auto u = Field::from_function(g, [](double x) { return std::sin(x) + 0.5 * std::cos(3 * x); });
  auto m = make_preset("rosenau_kdv_reg", 0.0, 0.0);
  const auto skew = explicit_rhs(m, u);
  m.form = NonlinearForm::conservative;
  const auto cons = explicit_rhs(m, u);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(skew[j], cons[j], 1e-10);
}

TEST(Velocity, Examples) {
  GridSpec g(pi, 64);
  EXPECT_EQ(sup_norm(velocity(make_preset("rosenau", 1.0, 0.0), Field::zeros(g))), 0.0);

  const auto u = Field::from_function(g, [](double x) { return std::sin(x); });
  const auto v = velocity(make_preset("rosenau", 1.0, 0.0), u);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(v[j], -std::sin(2 * g.x(j)) / 17.0, 1e-8);

  const auto w = random_smooth(g, 4);
  const auto bbm = make_preset("bbm_reg", 0.0, 0.05);
  const auto a = velocity(bbm, w), b = explicit_rhs(bbm, w);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-10);
}

// <u, R(u)> = -eps |u_x|^2 exactly: the skew flux and the odd dispersion drop out.
TEST(EnergyLaw, RosenauKdvSemiDiscrete) {
  GridSpec g(10.0, 256);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto u = random_smooth(g, seed, 40);
    for (double eps : {0.0, 0.1}) {
      for (double beta : {0.0, 0.1, 1.0}) {
        const auto m = make_preset("rosenau_kdv_reg", beta, eps);
        const double ux2 = std::pow(l2_norm(derivative(u, 1)), 2);
        const double lhs = inner(u, explicit_rhs(m, u)) + eps * ux2;
        const double scale = l2_norm(u) * (l2_norm(derivative(u, 1)) * sup_norm(u) + beta * l2_norm(derivative(u, 3))) + ux2;
        EXPECT_LE(std::abs(lhs), 1e-10 * scale) << seed << " " << eps << " " << beta;
      }
    }
  }
}

TEST(EnergyLaw, BbmSemiDiscrete) {
  GridSpec g(10.0, 256);
  for (std::uint64_t seed = 11; seed <= 14; ++seed) {
    const auto u = random_smooth(g, seed, 40);
    const auto m = make_preset("bbm_reg", 0.3, 0.05);
    const double ux2 = std::pow(l2_norm(derivative(u, 1)), 2);
    const double lhs = inner(u, explicit_rhs(m, u)) + m.epsilon * ux2;
    EXPECT_LE(std::abs(lhs), 1e-10 * (l2_norm(u) * l2_norm(derivative(u, 1)) * sup_norm(u) + ux2));
  }
}
