#pragma once

#include <cstdint>
#include <vector>

#include "levyspde/solver.hpp"

namespace levyspde {

// Randomised searches and Monte Carlo studies shared by the verify/converge
// commands and the test suites. Sample i always draws from path_seed(seed, i),
// so results do not depend on the thread count.

struct StructureReport {
  std::size_t samples = 0;
  double skew_tolerance = 1e-12;
  double max_skew_ratio = 0.0;  // |<B(u,v),v>| / (C_b |u|_Q ||v|| |v|_Q)
  std::size_t skew_violations = 0;
  double max_apply_defect = 0.0;  // |b(u,v,w) - <B(u,v),w>| relative to the B3 scale
  double max_interp_ratio = 0.0;  // |v|_Q^2 / (a0 |v| ||v||)
  std::size_t interp_violations = 0;
  double max_bound_ratio = 0.0;  // |b(u,v,w)| / (C_b |u|_Q ||v|| |w|_Q)
  std::size_t bound_violations = 0;

  bool passed() const {
    return skew_violations == 0 && interp_violations == 0 && bound_violations == 0 && max_apply_defect <= 1e-10;
  }
};

/// Random triples: dense vectors with a few spectral decays plus sparse
/// vectors on neighbouring modes, which is where the bounds are tight.
StructureReport structure_check(const ModelSpec& model, std::size_t samples, std::uint64_t seed);

struct MomentStat {
  double mean = 0.0;
  double se = 0.0;
  double expected = 0.0;
  bool ok() const;
};

struct NoiseMomentReport {
  std::size_t paths = 0;
  MomentStat jump_count;
  std::vector<MomentStat> compensated_mean;  // per component, expected 0
  MomentStat jump_isometry;                  // E|int G d(compensated)|^2
  std::vector<MomentStat> wiener_mean;
  MomentStat wiener_isometry;

  bool passed() const;
};

/// Frozen v: compensated jump integral and Wiener integral of the
/// coefficients over the grid horizon, M independent noise paths.
NoiseMomentReport noise_moment_check(const CoefficientSpec& coeff, const GalerkinVector& v, const TimeGrid& grid,
                                     std::size_t paths, std::uint64_t seed);

struct OrderStudy {
  std::vector<double> dts;
  std::vector<double> metric;
  std::vector<double> orders;  // log(metric[l]/metric[l+1]) / log(dt[l]/dt[l+1])
  double threshold = 0.0;
  double min_order() const;
  /// Vacuous when every metric is zero (nothing to refine).
  bool passed() const;
};

/// Energy-identity residual under dt refinement. Drift-only runs use the
/// single deterministic path and sum |residual|; noisy runs average
/// |sum residual| over paths whose noise is sampled on the finest grid.
OrderStudy ledger_order_study(const ModelSpec& model, const CoefficientSpec& coeff, const GalerkinVector& u0,
                              const SolverConfig& cfg, const std::vector<double>& dts, bool with_noise,
                              std::size_t paths, std::uint64_t seed, double threshold);

/// Self-convergence of the global solution: mean sup over the coarse grid of
/// |y_dt - y_{dt/2}| on shared noise, for dt, dt/2, ..., dt/2^levels.
OrderStudy strong_order_study(const ModelSpec& model, const CoefficientSpec& coeff, const GalerkinVector& u0,
                              const SolverConfig& cfg, std::size_t levels, std::size_t paths, std::uint64_t seed,
                              double threshold);

/// Outer-iteration reports on [0, cfg.T0] for M noise paths (cfg.T is
/// replaced by T0 for the study).
std::vector<IterationReport> picard_ensemble(const ModelSpec& model, const CoefficientSpec& coeff,
                                             const GalerkinVector& u0, const SolverConfig& cfg, std::size_t paths,
                                             std::uint64_t seed);

/// Contraction ratios a_{n+1}/a_n, b_{n+1}/b_n <= limit for n in [first, last]
/// (where defined).
bool contraction_within(const ContractionReport& rep, double limit, std::size_t first, std::size_t last);

}  // namespace levyspde
