#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "levyspde/models.hpp"
#include "levyspde/noise.hpp"

using namespace levyspde;

namespace {

SpectralBasis shell_basis(double nu = 0.5) { return dyadic_basis(DyadicShellParams{5, 2.0, nu}); }

FamilySpec family(CoefficientFamily f, double sigma = 0.0, double theta = 0.0) {
  FamilySpec s;
  s.family = f;
  s.sigma = {sigma};
  s.theta = theta;
  return s;
}

}  // namespace

TEST(LevyMeasure, GaussianMomentsClosedForm) {
  const auto m = LevyMeasure::compound_gaussian(3.0, 0.4, 0.7);
  EXPECT_DOUBLE_EQ(m.total_mass(), 3.0);
  EXPECT_NEAR(m.m1(), 1.2, 1e-12);
  EXPECT_NEAR(m.m2(), 3.0 * (0.16 + 0.49), 1e-12);
  EXPECT_FALSE(m.symmetric());
  EXPECT_NEAR(m.integrate([](double) { return 1.0; }), 3.0, 1e-10);
  EXPECT_NEAR(m.integrate([](double z) { return z; }), 1.2, 1e-10);
  EXPECT_NEAR(m.integrate([](double z) { return z * z; }), 1.95, 1e-10);
}

TEST(LevyMeasure, PowerMomentsClosedForm) {
  // c |z|^{-1-a} on 0.1 <= |z| <= 2, a = 1.5.
  const double c = 0.8, a = 1.5, lo = 0.1, hi = 2.0;
  const auto m = LevyMeasure::truncated_power(c, a, lo, hi);
  const double mass = 2.0 * c * (std::pow(lo, -a) - std::pow(hi, -a)) / a;
  const double m2 = 2.0 * c * (std::pow(hi, 2.0 - a) - std::pow(lo, 2.0 - a)) / (2.0 - a);
  EXPECT_NEAR(m.total_mass(), mass, 1e-12 * mass);
  EXPECT_NEAR(m.m2(), m2, 1e-12 * m2);
  EXPECT_TRUE(m.symmetric());
  EXPECT_NEAR(m.integrate([](double) { return 1.0; }), mass, 1e-8 * mass);
  EXPECT_NEAR(m.integrate([](double z) { return z * z; }), m2, 1e-8 * m2);
  EXPECT_NEAR(m.integrate([](double z) { return z; }), 0.0, 1e-10);
}

TEST(LevyMeasure, PowerAlphaTwoUsesLog) {
  const auto m = LevyMeasure::truncated_power(1.0, 2.0, 0.5, 4.0);
  EXPECT_NEAR(m.m2(), 2.0 * std::log(8.0), 1e-12);
}

TEST(LevyMeasure, RejectsBadParameters) {
  EXPECT_ANY_THROW(LevyMeasure::compound_gaussian(-1.0, 0.0, 1.0));
  EXPECT_ANY_THROW(LevyMeasure::compound_gaussian(1.0, 0.0, -1.0));
  EXPECT_ANY_THROW(LevyMeasure::truncated_power(1.0, 1.0, 2.0, 1.0));
  EXPECT_ANY_THROW(LevyMeasure::truncated_power(1.0, 1.0, 0.0, 1.0));
}

TEST(LevyMeasure, MarkSampleMean) {
  const auto m = LevyMeasure::compound_gaussian(2.0, 0.3, 1.0);
  std::mt19937_64 rng(11);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += m.sample_mark(rng);
  EXPECT_NEAR(s / n, 0.3, 3.0 * 1.0 / std::sqrt(n) + 1e-3);
}

TEST(Realization, ZeroMassHasNoJumps) {
  const auto grid = TimeGrid::over(5.0, 0.01);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = sample_realization(grid, LevyMeasure::none(), WienerDriverSpec{2}, seed);
    EXPECT_TRUE(r.jumps().empty());
  }
}

TEST(Realization, PoissonCountMean) {
  const auto grid = TimeGrid::over(2.0, 0.1);
  const auto m = LevyMeasure::compound_gaussian(5.0, 0.0, 1.0);
  const int n = 10000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += static_cast<double>(sample_realization(grid, m, {}, path_seed(3, i)).jumps().size());
  const double expected = 10.0;
  EXPECT_NEAR(s / n, expected, 3.0 * std::sqrt(expected / n));
}

TEST(Realization, SameSeedIdentical) {
  const auto grid = TimeGrid::over(1.0, 0.01);
  const auto m = LevyMeasure::compound_gaussian(20.0, 0.1, 0.5);
  const auto a = sample_realization(grid, m, WienerDriverSpec{3}, 42);
  const auto b = sample_realization(grid, m, WienerDriverSpec{3}, 42);
  const auto c = sample_realization(grid, m, WienerDriverSpec{3}, 43);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
}

TEST(Realization, JumpsBinnedIntoSteps) {
  const auto grid = TimeGrid::over(1.0, 0.05);
  const auto r = sample_realization(grid, LevyMeasure::compound_gaussian(40.0, 0.0, 1.0), {}, 5);
  ASSERT_FALSE(r.jumps().empty());
  std::size_t total = 0;
  for (std::size_t k = 0; k < grid.steps; ++k) {
    for (const auto& j : r.jumps_in_step(k)) {
      EXPECT_GT(j.time, grid.time(k));
      EXPECT_LE(j.time, grid.time(k + 1));
      EXPECT_EQ(j.step, k);
    }
    total += r.jumps_in_step(k).size();
  }
  EXPECT_EQ(total, r.jumps().size());
}

TEST(Realization, StepOfHalfOpenIntervals) {
  const auto grid = TimeGrid::over(1.0, 0.25);
  EXPECT_EQ(step_of(grid, 0.1), 0u);
  EXPECT_EQ(step_of(grid, 0.25), 0u);
  EXPECT_EQ(step_of(grid, 0.26), 1u);
  EXPECT_EQ(step_of(grid, 1.0), 3u);
}

TEST(Realization, WienerIncrementVariance) {
  const auto grid = TimeGrid::over(10.0, 0.01);
  const auto r = sample_realization(grid, LevyMeasure::none(), WienerDriverSpec{1}, 9);
  double s2 = 0.0;
  for (std::size_t k = 0; k < grid.steps; ++k) s2 += r.wiener_increment(k)[0] * r.wiener_increment(k)[0];
  // quadratic variation of W over [0, 10]
  EXPECT_NEAR(s2, 10.0, 3.0 * std::sqrt(2.0 * grid.steps) * grid.dt);
}

TEST(Realization, CsvRoundTrip) {
  const auto grid = TimeGrid::over(0.5, 0.01);
  const auto r = sample_realization(grid, LevyMeasure::compound_gaussian(30.0, 0.2, 0.9), WienerDriverSpec{2}, 17);
  std::stringstream ss;
  write_realization_csv(ss, r);
  const auto back = read_realization_csv(ss);
  EXPECT_TRUE(back == r);
}

TEST(Realization, CoarsenSumsIncrementsKeepsJumps) {
  const auto grid = TimeGrid::over(1.0, 0.01);
  const auto r = sample_realization(grid, LevyMeasure::compound_gaussian(30.0, 0.0, 1.0), WienerDriverSpec{2}, 23);
  const auto c = r.coarsen(4);
  EXPECT_DOUBLE_EQ(c.grid().dt, 0.04);
  EXPECT_EQ(c.grid().steps, 25u);
  EXPECT_EQ(c.jumps().size(), r.jumps().size());
  for (std::size_t k = 0; k < c.grid().steps; ++k)
    for (std::size_t d = 0; d < 2; ++d) {
      double s = 0.0;
      for (std::size_t j = 0; j < 4; ++j) s += r.wiener_increment(4 * k + j)[d];
      EXPECT_NEAR(c.wiener_increment(k)[d], s, 1e-15);
    }
  for (const auto& j : c.jumps()) EXPECT_EQ(j.step, step_of(c.grid(), j.time));
  EXPECT_ANY_THROW((void)r.coarsen(3));
}

TEST(PathSeed, DistinctAndStable) {
  EXPECT_EQ(path_seed(1, 0), path_seed(1, 0));
  EXPECT_NE(path_seed(1, 0), path_seed(1, 1));
  EXPECT_NE(path_seed(1, 0), path_seed(2, 0));
}

TEST(Coefficients, AdditiveIndependentOfState) {
  const auto basis = shell_basis();
  const CoefficientSpec c(family(CoefficientFamily::additive, 0.3), family(CoefficientFamily::additive, 0.2),
                          LevyMeasure::compound_gaussian(1.0, 0.0, 1.0), basis, 3);
  std::mt19937_64 rng(1);
  const auto v1 = random_vector(basis, rng), v2 = random_vector(basis, rng);
  EXPECT_TRUE(c.eval_G(0.0, v1, 0.7) == c.eval_G(0.0, v2, 0.7));
  const std::vector<double> dw{0.1, -0.2, 0.3};
  EXPECT_TRUE(c.eval_Psi_apply(0.0, v1, dw) == c.eval_Psi_apply(0.0, v2, dw));
  EXPECT_NEAR(c.eval_G(0.0, v1, 0.7)[4], 0.21, 1e-15);
  EXPECT_NEAR(c.eval_Psi_apply(0.0, v1, dw)[2], 0.06, 1e-15);
  EXPECT_EQ(c.eval_Psi_apply(0.0, v1, dw)[3], 0.0);
}

TEST(Coefficients, GradientOnFirstMode) {
  const auto basis = shell_basis();
  const double theta = 0.4;
  const CoefficientSpec c(family(CoefficientFamily::gradient, 0.0, theta), FamilySpec{},
                          LevyMeasure::compound_gaussian(1.0, 0.0, 0.5), basis, 0);
  const auto e1 = GalerkinVector::unit(basis.dim(), 0);
  const auto g = c.eval_G(0.0, e1, 1.0);
  // first shell wavenumber k0 = 2
  EXPECT_NEAR(g[0], theta * 2.0, 1e-15);
  for (std::size_t k = 1; k < g.dim(); ++k) EXPECT_EQ(g[k], 0.0);
  const auto z0 = c.eval_G(0.0, e1, 0.0);
  for (std::size_t k = 0; k < z0.dim(); ++k) EXPECT_EQ(z0[k], 0.0);
}

TEST(Coefficients, ZeroIncrementGivesZero) {
  const auto basis = shell_basis();
  const CoefficientSpec c(FamilySpec{}, family(CoefficientFamily::diagonal, 0.5), LevyMeasure::none(), basis, 5);
  std::mt19937_64 rng(2);
  const auto v = random_vector(basis, rng);
  const std::vector<double> dw(5, 0.0);
  EXPECT_EQ(h_norm(c.eval_Psi_apply(0.0, v, dw)), 0.0);
}

TEST(Coefficients, CompensatorSymmetricIsZero) {
  const auto basis = shell_basis();
  const CoefficientSpec c(family(CoefficientFamily::gradient, 0.0, 0.3), FamilySpec{},
                          LevyMeasure::truncated_power(1.0, 1.0, 0.1, 1.0), basis, 0);
  std::mt19937_64 rng(3);
  EXPECT_EQ(h_norm(c.compensator_drift(0.0, random_vector(basis, rng))), 0.0);
}

TEST(Coefficients, CompensatorMatchesQuadrature) {
  const auto basis = shell_basis();
  const double theta = 0.3;
  const auto measure = LevyMeasure::compound_gaussian(1.0, 0.3, 1.0);
  const CoefficientSpec c(family(CoefficientFamily::gradient, 0.0, theta), FamilySpec{}, measure, basis, 0);
  const auto e1 = GalerkinVector::unit(basis.dim(), 0);
  const auto comp = c.compensator_drift(0.0, e1);
  EXPECT_NEAR(comp[0], 0.3 * theta * 2.0, 1e-14);
  const double quad = measure.integrate([&](double z) { return c.eval_G(0.0, e1, z)[0]; });
  EXPECT_NEAR(comp[0], quad, 1e-10);
  // multiplicative family vanishes at v = 0
  EXPECT_EQ(h_norm(c.compensator_drift(0.0, GalerkinVector(basis.dim()))), 0.0);
}

TEST(Constants, GradientL5) {
  // theta^2 m2 / nu with m2 = 1, nu = 1
  const auto basis = shell_basis(1.0);
  const auto m = LevyMeasure::compound_gaussian(1.0, 0.0, 1.0);
  const CoefficientSpec ok(family(CoefficientFamily::gradient, 0.0, 1.0), FamilySpec{}, m, basis, 0);
  EXPECT_NEAR(ok.constants().l5, 1.0, 1e-15);
  EXPECT_NEAR(ok.constants().l2, 1.0, 1e-15);
  try {
    CoefficientSpec bad(family(CoefficientFamily::gradient, 0.0, 1.5), FamilySpec{}, m, basis, 0);
    FAIL() << "L5 = 2.25 accepted";
  } catch (const ConditionViolation& e) {
    EXPECT_NE(std::string(e.what()).find("(H3)"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("2.25"), std::string::npos);
  }
}

TEST(Constants, ZeroSigmaAllZero) {
  const auto basis = shell_basis();
  const CoefficientSpec c(family(CoefficientFamily::diagonal, 0.0), family(CoefficientFamily::additive, 0.0),
                          LevyMeasure::compound_gaussian(2.0, 0.0, 1.0), basis, 5);
  const auto& L = c.constants();
  EXPECT_EQ(L.l1 + L.l2 + L.l3 + L.l4 + L.l5, 0.0);
}

TEST(Constants, AdditiveAndDiagonalClosedForm) {
  const auto basis = shell_basis();
  const auto m = LevyMeasure::compound_gaussian(2.0, 0.0, 0.5);  // m2 = 0.5
  FamilySpec jump = family(CoefficientFamily::diagonal);
  jump.sigma = {0.1, 0.4, 0.2};
  const CoefficientSpec c(jump, family(CoefficientFamily::additive, 0.3), m, basis, 2);
  EXPECT_NEAR(c.constants().l1, 0.5 * 0.16, 1e-15);
  EXPECT_NEAR(c.constants().l4, 0.5 * 0.16, 1e-15);
  EXPECT_NEAR(c.constants().l3, 2 * 0.09, 1e-15);
}

TEST(Coefficients, ItoIsometry) {
  const auto basis = shell_basis();
  const CoefficientSpec c(FamilySpec{}, family(CoefficientFamily::diagonal, 0.7), LevyMeasure::none(), basis, 4);
  std::mt19937_64 rng(5);
  const auto v = random_vector(basis, rng);
  const double dt = 0.01;
  std::normal_distribution<double> g(0.0, std::sqrt(dt));
  const int n = 10000;
  double s = 0.0, s2 = 0.0;
  std::vector<double> dw(4);
  for (int i = 0; i < n; ++i) {
    for (auto& x : dw) x = g(rng);
    const auto p = c.eval_Psi_apply(0.0, v, dw);
    const double q = dot(p, p);
    s += q;
    s2 += q * q;
  }
  double expected = 0.0;
  for (std::size_t j = 0; j < 4; ++j) expected += 0.49 * v[j] * v[j];
  EXPECT_NEAR(c.psi_hs_norm_sq(0.0, v), expected, 1e-14);
  expected *= dt;
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, expected, 3.0 * se);
}

TEST(Coefficients, EmpiricalConditionsHold) {
  const auto basis = shell_basis(0.1);
  const auto m = LevyMeasure::compound_gaussian(3.0, 0.2, 0.5);
  for (auto f : {CoefficientFamily::additive, CoefficientFamily::diagonal, CoefficientFamily::gradient}) {
    const CoefficientSpec c(family(f, 0.3, 0.1), family(CoefficientFamily::diagonal, 0.2), m, basis, 5);
    const auto rep = empirical_condition_check(c, 10000, 8);
    EXPECT_TRUE(rep.passed()) << to_string(f) << " lip " << rep.max_ratio_lipschitz << " growth "
                              << rep.max_ratio_growth;
  }
  // the gradient bound is attained
  const CoefficientSpec grad(family(CoefficientFamily::gradient, 0.0, 0.1), FamilySpec{}, m, basis, 0);
  const auto rep = empirical_condition_check(grad, 400, 8);
  EXPECT_NEAR(rep.max_ratio_growth, 1.0, 1e-9);
}

TEST(Coefficients, FamilyNames) {
  for (auto f : {CoefficientFamily::none, CoefficientFamily::additive, CoefficientFamily::diagonal,
                 CoefficientFamily::gradient})
    EXPECT_EQ(coefficient_family_from_string(to_string(f)), f);
  EXPECT_ANY_THROW(coefficient_family_from_string("cubic"));
}
