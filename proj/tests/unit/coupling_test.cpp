#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlb/coupling.hpp"
#include "test_support.hpp"

using namespace nlb;
using nlb::testing::random_smooth;
using nlb::testing::sample;

TEST(Coupling, RejectsShiftOutsidePeriod) {
  const Grid g(16, 2.0);
  EXPECT_THROW(NonlocalCoupling(Sign::Plus, -0.1, g), DomainError);
  EXPECT_THROW(NonlocalCoupling(Sign::Plus, 2.1, g), DomainError);
  EXPECT_NO_THROW(NonlocalCoupling(Sign::Minus, 2.0, g));
}

TEST(Coupling, Alignment) {
  const Grid g(16, 2.0);
  const NonlocalCoupling a(Sign::Plus, 0.375, g);
  EXPECT_TRUE(a.aligned());
  EXPECT_EQ(a.offset_cells(), 3);
  EXPECT_EQ(a.resolve(ShiftMethod::Auto), ShiftMethod::GridOffset);
  const NonlocalCoupling b(Sign::Plus, 0.3, g);
  EXPECT_FALSE(b.aligned());
  EXPECT_EQ(b.resolve(ShiftMethod::Auto), ShiftMethod::SpectralPhase);
  EXPECT_THROW(shift_combine(Field::zeros(g), b, ShiftMethod::GridOffset), AlignmentError);
}

// sin(w(x+h)) +- sin(w(x-h)) by the angle-addition formulas.
TEST(Coupling, MatchesTrigIdentities) {
  const Grid g(64, 2.0);
  const double w = 3.0 * std::numbers::pi;
  const auto u = sample(g, [&](double x) { return std::sin(w * x); });
  for (double h : {0.25, 0.3, 1.0, 1.7}) {
    for (auto method : {ShiftMethod::Auto, ShiftMethod::SpectralPhase}) {
      const auto plus = shift_combine(u, NonlocalCoupling(Sign::Plus, h, g), method);
      const auto minus = shift_combine(u, NonlocalCoupling(Sign::Minus, h, g), method);
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.node(j);
        EXPECT_NEAR(plus[j], 2.0 * std::sin(w * x) * std::cos(w * h), 1e-12);
        EXPECT_NEAR(minus[j], 2.0 * std::cos(w * x) * std::sin(w * h), 1e-12);
      }
    }
  }
}

TEST(Coupling, OffsetAndPhaseAgreeOnAlignedShifts) {
  std::mt19937_64 rng(11);
  const Grid g(128, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = sample(g, random_smooth(rng, 3.0, 12));
    for (std::ptrdiff_t cells : {0, 1, 17, 64, 100, 128}) {
      const double h = static_cast<double>(cells) * g.spacing();
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        const NonlocalCoupling c(s, h, g);
        const auto a = shift_combine(u, c, ShiftMethod::GridOffset);
        const auto b = shift_combine(u, c, ShiftMethod::SpectralPhase);
        EXPECT_LE(sup_distance(a, b), 1e-10);
      }
    }
  }
}

TEST(Coupling, ZeroShift) {
  std::mt19937_64 rng(3);
  const Grid g(32, 1.0);
  const auto u = sample(g, random_smooth(rng, 1.0));
  const auto plus = shift_combine(u, NonlocalCoupling(Sign::Plus, 0.0, g));
  const auto minus = shift_combine(u, NonlocalCoupling(Sign::Minus, 0.0, g));
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_DOUBLE_EQ(plus[j], 2.0 * u[j]);
    EXPECT_DOUBLE_EQ(minus[j], 0.0);
  }
}

TEST(Coupling, Linearity) {
  std::mt19937_64 rng(5);
  const Grid g(64, 2.0);
  const auto u = sample(g, random_smooth(rng, 2.0));
  const auto v = sample(g, random_smooth(rng, 2.0));
  std::vector<double> w(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) w[j] = 2.5 * u[j] - 0.75 * v[j];
  for (double h : {0.5, 0.33}) {
    const NonlocalCoupling c(Sign::Minus, h, g);
    const auto lu = shift_combine(u, c), lv = shift_combine(v, c), lw = shift_combine(u.with_values(w), c);
    for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(lw[j], 2.5 * lu[j] - 0.75 * lv[j], 1e-12);
  }
}

TEST(Coupling, ReflectionIdentities) {
  std::mt19937_64 rng(13);
  const Grid g(96, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = sample(g, random_smooth(rng, 2.0, 20));
    for (double h : {0.25, 0.4, 0.9}) {
      const NonlocalCoupling p(Sign::Plus, h, g), m(Sign::Minus, h, g);
      const auto pa = shift_combine(u, p), pb = shift_combine(u, p.reflected());
      const auto ma = shift_combine(u, m), mb = shift_combine(u, m.reflected());
      for (std::size_t j = 0; j < g.size(); ++j) {
        EXPECT_NEAR(pa[j], pb[j], 1e-12);
        EXPECT_NEAR(ma[j], -mb[j], 1e-12);
      }
    }
  }
}

TEST(Coupling, PreservesTimeStamp) {
  const Grid g(16, 1.0);
  const auto u = Field::zeros(g, 0.25);
  EXPECT_DOUBLE_EQ(shift_combine(u, NonlocalCoupling(Sign::Plus, 0.125, g)).time(), 0.25);
}
