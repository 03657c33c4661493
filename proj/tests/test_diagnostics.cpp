#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "levyspde/diagnostics.hpp"
#include "levyspde/models.hpp"
#include "levyspde/solver.hpp"

using namespace levyspde;

namespace {

FamilySpec family(CoefficientFamily f, double sigma = 0.0, double theta = 0.0) {
  FamilySpec s;
  s.family = f;
  s.sigma = {sigma};
  s.theta = theta;
  return s;
}

std::shared_ptr<const ModelSpec> shell(std::size_t n = 5, double nu = 0.1) {
  return std::make_shared<DyadicShell>(DyadicShellParams{n, 2.0, nu});
}

std::shared_ptr<const ModelSpec> linear(std::size_t n = 4, double nu = 1.0) {
  return std::make_shared<LinearModel>(LinearModelParams{n, nu});
}

GalerkinVector vec(std::initializer_list<double> xs, std::size_t n) {
  GalerkinVector v(n);
  std::size_t k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

SolverConfig config(double T, double dt) {
  SolverConfig c;
  c.T = T;
  c.dt = dt;
  c.T0 = std::min(T, 0.1);
  return c;
}

}  // namespace

TEST(EnergyLedger, DeterministicResidualIsSecondOrder) {
  const auto model = shell();
  const CoefficientSpec coeff(FamilySpec{}, FamilySpec{}, LevyMeasure::none(), model->basis(), 0, {0.5, 0.2});
  const auto u0 = vec({1.0, 0.5, 0.25}, 5);
  auto max_residual = [&](double dt) {
    const auto cfg = config(0.5, dt);
    const auto noise = NoiseRealization::zero(cfg.grid());
    const System sys{*model, coeff, noise};
    const auto ledger = energy_ledger(baseline_direct(u0, sys, cfg, std::nullopt), sys);
    double m = 0.0;
    for (const auto& s : ledger.steps) m = std::max(m, std::abs(s.residual));
    return m;
  };
  const double r1 = max_residual(0.01), r2 = max_residual(0.005);
  EXPECT_LT(r1, 50.0 * 0.01 * 0.01);
  EXPECT_NEAR(r1 / r2, 4.0, 0.8);
}

TEST(EnergyLedger, AdditiveJumpQuadraticTermExact) {
  const auto model = linear(3);
  const auto measure = LevyMeasure::compound_gaussian(1.0, 0.0, 1.0);
  const CoefficientSpec coeff(family(CoefficientFamily::additive, 0.5), FamilySpec{}, measure, model->basis(), 0);
  const auto cfg = config(0.3, 0.1);
  const NoiseRealization noise(cfg.grid(), 0, {}, {Jump{0.12, 1.5, 1}, Jump{0.18, -0.5, 1}}, 0);
  const System sys{*model, coeff, noise};
  const auto path = baseline_direct(vec({1.0, 0.0, -1.0}, 3), sys, cfg, std::nullopt);
  const auto ledger = energy_ledger(path, sys);
  EXPECT_EQ(ledger.steps[0].jump_quad, 0.0);
  // (1.5^2 + 0.5^2) * |sigma|^2 over three modes
  EXPECT_NEAR(ledger.steps[1].jump_quad, 2.5 * 3 * 0.25, 1e-15);
  // 2 (1.5 - 0.5) <sigma 1, y>
  const auto& y = path.state(1);
  EXPECT_NEAR(ledger.steps[1].jump_mart, 2.0 * 1.0 * 0.5 * (y[0] + y[1] + y[2]), 1e-15);
}

TEST(EnergyLedger, DriftOnlyResidualHalvesWithDt) {
  const auto model = shell();
  const CoefficientSpec coeff(FamilySpec{}, FamilySpec{}, LevyMeasure::none(), model->basis(), 0, {0.5});
  const auto u0 = vec({1.0, 0.5, 0.25}, 5);
  auto total = [&](double dt) {
    const auto cfg = config(1.0, dt);
    const auto noise = NoiseRealization::zero(cfg.grid());
    const System sys{*model, coeff, noise};
    return energy_ledger(baseline_direct(u0, sys, cfg, std::nullopt), sys).residual_abs_sum();
  };
  const double e1 = total(0.02), e2 = total(0.01), e3 = total(0.005);
  EXPECT_NEAR(e1 / e2, 2.0, 0.4);
  EXPECT_NEAR(e2 / e3, 2.0, 0.4);
}

TEST(EnergyLedger, RejectsForeignGrid) {
  const auto model = linear(2);
  const CoefficientSpec coeff(FamilySpec{}, FamilySpec{}, LevyMeasure::none(), model->basis(), 0);
  const auto noise = NoiseRealization::zero(TimeGrid::over(1.0, 0.1));
  const System sys{*model, coeff, noise};
  EXPECT_THROW(energy_ledger(zero_path(0.0, 0.05, 4, model->basis()), sys), std::invalid_argument);
  EXPECT_THROW(energy_ledger(zero_path(0.0, 0.1, 11, model->basis()), sys), std::invalid_argument);
}

TEST(Gronwall, ClosedFormAndMonotone) {
  NoiseConstants c;
  c.l3 = 0.5;
  c.l4 = 0.2;
  c.l5 = 1.0;
  const double b = gronwall_bound(1.0, 0.3, c, 2.0);
  EXPECT_NEAR(b, (1.0 + 2.0 * 0.3 + 0.5 * 2.0) * std::exp(0.4), 1e-14);
  for (double NoiseConstants::*field : {&NoiseConstants::l3, &NoiseConstants::l4, &NoiseConstants::l5}) {
    NoiseConstants d = c;
    d.*field += 0.1;
    EXPECT_GT(gronwall_bound(1.0, 0.3, d, 2.0), b);
  }
}

TEST(Apriori, ZeroNoiseDecay) {
  const auto model = linear(3);
  const CoefficientSpec coeff(FamilySpec{}, FamilySpec{}, LevyMeasure::none(), model->basis(), 0);
  const auto cfg = config(1.0, 0.01);
  const auto noise = NoiseRealization::zero(cfg.grid());
  const System sys{*model, coeff, noise};
  std::vector<PathSegment> paths(30, baseline_direct(vec({1.0, 1.0}, 3), sys, cfg, std::nullopt));
  const auto r = apriori_check(paths, coeff);
  EXPECT_TRUE(r.passed());
  EXPECT_DOUBLE_EQ(r.bound, 2.0);
  EXPECT_DOUBLE_EQ(r.sup_mean_energy, 2.0);
  EXPECT_EQ(r.sup_time, 0.0);
  EXPECT_LT(r.mean_dissipation, 1.0);  // |u0|^2 / 2 minus the decayed tail
}

namespace {

std::vector<PathSegment> ensemble(const ModelSpec& model, const CoefficientSpec& coeff, const GalerkinVector& u0,
                                  const SolverConfig& cfg, std::size_t n) {
  std::vector<PathSegment> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto noise = sample_realization(cfg.grid(), coeff.measure(), WienerDriverSpec{coeff.wiener_dims()},
                                          path_seed(99, i));
    const System sys{model, coeff, noise};
    out.push_back(global_solve(u0, sys, cfg).trajectory);
  }
  return out;
}

}  // namespace

TEST(Apriori, GradientNoiseWithUnitL5) {
  const auto model = shell(5, 0.01);
  // theta^2 m2 / nu = 0.01 * 1 / 0.01
  const CoefficientSpec coeff(family(CoefficientFamily::gradient, 0.0, 0.1), FamilySpec{},
                              LevyMeasure::compound_gaussian(100.0, 0.0, 0.1), model->basis(), 0);
  ASSERT_NEAR(coeff.constants().l5, 1.0, 1e-12);
  const auto u0 = vec({1.0, 0.5, 0.25}, 5);
  const auto r = apriori_check(ensemble(*model, coeff, u0, config(0.5, 0.005), 60), coeff);
  EXPECT_NEAR(r.bound, dot(u0, u0), 1e-15);
  EXPECT_NEAR(r.bound_dissipation, 2.0 * dot(u0, u0), 1e-12);
  EXPECT_TRUE(r.passed()) << r.sup_mean_energy << " vs " << r.bound;
}

TEST(Apriori, AdditiveOnlyFromRest) {
  const auto model = shell(5, 0.1);
  const CoefficientSpec coeff(FamilySpec{}, family(CoefficientFamily::additive, 0.3), LevyMeasure::none(),
                              model->basis(), 5);
  const auto cfg = config(1.0, 0.01);
  const auto r = apriori_check(ensemble(*model, coeff, GalerkinVector(5), cfg, 60), coeff);
  EXPECT_NEAR(r.bound, 5 * 0.09 * 1.0, 1e-14);  // L3 T
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.sup_mean_energy, 0.0);
}

TEST(Apriori, NeedsThirtyPaths) {
  const auto model = linear(2);
  const CoefficientSpec coeff(FamilySpec{}, FamilySpec{}, LevyMeasure::none(), model->basis(), 0);
  std::vector<PathSegment> paths(29, zero_path(0.0, 0.1, 10, model->basis()));
  EXPECT_THROW(apriori_check(paths, coeff), std::invalid_argument);
}

TEST(XiCap, ZeroPathsGiveZero) {
  const auto basis = shell()->basis();
  const auto z = zero_path(0.0, 0.01, 20, basis);
  const auto r = xi_cap_check(z, z, 0.5);
  EXPECT_EQ(r.integral, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(XiCap, IndicatorCapsLargePaths) {
  const auto model = shell(5, 0.1);
  const auto basis = model->basis();
  // constant state with ||y||^2 = nu k^2 = 0.1 * 64 = 6.4
  PathSegment p(0.0, 0.01, basis, GalerkinVector::unit(5, 2));
  for (int i = 0; i < 200; ++i) p.append(GalerkinVector::unit(5, 2));
  const double delta = 0.2;
  const auto r = xi_cap_check(p, p, delta);
  // Xi vanishes once the running integral passes (3 delta)^2
  const double v = 6.4;
  const double cutoff_steps = std::floor(9.0 * delta * delta / (0.01 * v)) + 1.0;
  EXPECT_NEAR(r.integral, 2.0 * v * 0.01 * cutoff_steps, 1e-12);
  EXPECT_NEAR(r.overshoot, 0.01 * v, 1e-15);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.integral, r.cap);
}

TEST(InDiagnostic, ZeroAndStationaryCases) {
  const auto model = shell();
  const Cutoff cut(10.0, 0.5);
  const auto z = zero_path(0.0, 0.01, 10, model->basis());
  const auto r0 = in_diagnostic(z, z, z, *model, cut, EnvelopeParams{});
  for (double x : r0.values) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(r0.violation_fraction, 0.0);

  PathSegment p(0.0, 0.01, model->basis(), vec({1.0, 0.5}, 5));
  for (int i = 0; i < 10; ++i) p.append(vec({1.0, 0.5}, 5));
  const auto r1 = in_diagnostic(p, p, p, *model, cut, EnvelopeParams{});
  for (double x : r1.values) EXPECT_EQ(x, 0.0);
}

TEST(InDiagnostic, CalibratedConstantRemovesViolations) {
  const auto model = shell(5, 0.1);
  const CoefficientSpec coeff(family(CoefficientFamily::diagonal, 0.3), FamilySpec{},
                              LevyMeasure::compound_gaussian(10.0, 0.0, 1.0), model->basis(), 0);
  auto cfg = config(0.1, 0.005);
  cfg.max_picard = 3;
  const auto noise = sample_realization(cfg.grid(), coeff.measure(), {}, 4);
  const System sys{*model, coeff, noise};
  const Cutoff cut(cfg.m, cfg.delta0);
  const auto u0 = vec({2.0, 1.0, 0.5}, 5);
  const auto y0 = zero_path(0.0, cfg.dt, 20, model->basis());
  const auto y1 = solve_linearized(y0, u0, sys, cfg, cut);
  const auto y2 = solve_linearized(y1, u0, sys, cfg, cut);
  const double eps = 0.5, p = 1.0;
  const double c = calibrate_envelope_constant(y0, y1, y2, *model, cut, eps, p);
  ASSERT_TRUE(std::isfinite(c));
  const auto r = in_diagnostic(y0, y1, y2, *model, cut, EnvelopeParams{eps, p, c * (1.0 + 1e-12) + 1e-300});
  EXPECT_EQ(r.violation_fraction, 0.0);
  if (c > 0.0) {
    const auto tight = in_diagnostic(y0, y1, y2, *model, cut, EnvelopeParams{eps, p, 0.5 * c});
    EXPECT_GT(tight.violation_fraction, 0.0);
  }
}

namespace {

std::vector<IterationReport> picard_reports(const ModelSpec& model, const CoefficientSpec& coeff,
                                            const GalerkinVector& u0, const SolverConfig& cfg, std::size_t steps,
                                            std::size_t n) {
  std::vector<IterationReport> out;
  const Cutoff cut(cfg.m, cfg.delta0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto noise = sample_realization(cfg.grid(), coeff.measure(), WienerDriverSpec{coeff.wiener_dims()},
                                          path_seed(5, i));
    const System sys{model, coeff, noise};
    out.push_back(picard_local(u0, 0, steps, sys, cfg, cut).report);
  }
  return out;
}

}  // namespace

TEST(Contraction, LinearModelSettlesAfterOneIterate) {
  const auto model = linear(4);
  const CoefficientSpec coeff(family(CoefficientFamily::diagonal, 0.2), family(CoefficientFamily::additive, 0.1),
                              LevyMeasure::compound_gaussian(5.0, 0.0, 0.5), model->basis(), 2);
  const auto rep =
      contraction_report(picard_reports(*model, coeff, vec({1.0, 0.5}, 4), config(0.1, 0.01), 10, 30));
  ASSERT_GE(rep.a.size(), 2u);
  EXPECT_GT(rep.a[0], 0.0);
  for (std::size_t n = 1; n < rep.a.size(); ++n) {
    EXPECT_EQ(rep.a[n], 0.0);
    EXPECT_EQ(rep.b[n], 0.0);
  }
}

TEST(Contraction, ShortWindowsContractFast) {
  const auto model = shell(5, 0.1);
  const CoefficientSpec coeff(family(CoefficientFamily::diagonal, 0.2), family(CoefficientFamily::diagonal, 0.1),
                              LevyMeasure::compound_gaussian(5.0, 0.0, 0.5), model->basis(), 5);
  auto cfg = config(0.02, 0.001);
  cfg.tol_picard = 1e-30;
  const auto rep = contraction_report(picard_reports(*model, coeff, vec({1.0, 0.5, 0.25}, 5), cfg, 20, 30));
  ASSERT_GE(rep.ratio_a.size(), 3u);
  for (std::size_t n = 1; n < 4 && n < rep.ratio_a.size(); ++n) {
    EXPECT_LT(rep.ratio_a[n], 0.5) << "n = " << n;
    EXPECT_LT(rep.ratio_b[n], 0.5) << "n = " << n;
  }
  EXPECT_NEAR(rep.partial_a[3], rep.a[2] + rep.a[3], 1e-15);
}

TEST(Contraction, NeedsThirtyPaths) {
  std::vector<IterationReport> few(10);
  EXPECT_THROW(contraction_report(few), std::invalid_argument);
}
