#include <gtest/gtest.h>

#include <cmath>

#include "levyspde/cutoff.hpp"

using namespace levyspde;

TEST(Smoothstep, EndpointsAndMidpoint) {
  EXPECT_EQ(smoothstep(0.0), 0.0);
  EXPECT_EQ(smoothstep(1.0), 1.0);
  EXPECT_EQ(smoothstep(-3.0), 0.0);
  EXPECT_EQ(smoothstep(7.0), 1.0);
  EXPECT_DOUBLE_EQ(smoothstep(0.5), 0.5);
}

TEST(Smoothstep, DerivativeMatchesFiniteDifference) {
  for (double s = 0.05; s < 1.0; s += 0.05) {
    const double h = 1e-6;
    const double fd = (smoothstep(s + h) - smoothstep(s - h)) / (2 * h);
    EXPECT_NEAR(smoothstep_derivative(s), fd, 1e-7);
  }
}

TEST(Cutoff, PhiAndGPlateaus) {
  const Cutoff c(3.0, 0.5);
  EXPECT_EQ(c.phi(3.0), 1.0);
  EXPECT_EQ(c.phi(0.0), 1.0);
  EXPECT_EQ(c.phi(4.0), 0.0);
  EXPECT_EQ(c.phi(10.0), 0.0);
  EXPECT_EQ(c.g(0.5), 1.0);
  EXPECT_EQ(c.g(1.0), 0.0);
  for (double x = 0; x < 6; x += 0.01) {
    EXPECT_GE(c.phi(x), 0.0);
    EXPECT_LE(c.phi(x), 1.0);
  }
}

TEST(Cutoff, MaxSlopeIsFifteenEighths) {
  const Cutoff c(2.0, 0.25);
  double phi_max = 0.0, g_max = 0.0;
  for (int i = 0; i <= 2000000; ++i) {
    const double x = 1.5 + 2.0 * i / 2000000.0;
    phi_max = std::max(phi_max, std::abs(c.phi_derivative(x)));
    const double y = 0.2 + 0.4 * i / 2000000.0;
    g_max = std::max(g_max, std::abs(c.g_derivative(y)));
  }
  EXPECT_NEAR(phi_max, 1.875, 1e-9);
  EXPECT_NEAR(g_max * c.delta(), 1.875, 1e-9);
  EXPECT_EQ(Cutoff::kPhiSlope, 1.875);
}
