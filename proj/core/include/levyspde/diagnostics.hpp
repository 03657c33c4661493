#pragma once

#include <span>
#include <vector>

#include "levyspde/cutoff.hpp"
#include "levyspde/solver_types.hpp"

namespace levyspde {

// ---------------------------------------------------------------------------
// Discrete Ito identity for |y|^2

struct LedgerStep {
  double increment = 0.0;  // |y_{k+1}|^2 - |y_k|^2
  double dissipation = 0.0;
  double forcing = 0.0;
  double wiener_mart = 0.0;
  double jump_mart = 0.0;
  double jump_quad = 0.0;
  double wiener_quad = 0.0;
  double residual = 0.0;
};

struct EnergyLedger {
  std::vector<LedgerStep> steps;

  double residual_abs_sum() const;
  /// Accumulated defect of the identity over the whole path.
  double residual_total() const;
};

/// Per step: increment = -dissipation + forcing + wiener_mart + jump_mart
/// + jump_quad + wiener_quad + residual, with every term evaluated at the
/// left endpoint. The path must have been produced on sys.noise's grid.
EnergyLedger energy_ledger(const PathSegment& path, const System& sys);

// ---------------------------------------------------------------------------
// Moment bound

/// (E|u0|^2 + 2/(2-L5) int ||f||_{V'}^2 + L3 T) exp(L4 T).
double gronwall_bound(double mean_u0_sq, double forcing_integral, const NoiseConstants& c, double T);

struct AprioriReport {
  std::size_t paths = 0;
  double mean_initial_energy = 0.0;
  double forcing_integral = 0.0;
  double sup_mean_energy = 0.0;  // sup_t mean |u(t)|^2
  double sup_mean_energy_se = 0.0;
  double sup_time = 0.0;
  double mean_dissipation = 0.0;  // mean int_0^T ||u||^2
  double mean_dissipation_se = 0.0;
  double bound = 0.0;              // B(T)
  double bound_dissipation = 0.0;  // 2/(2-L5) B(T)
  bool energy_ok = false;
  bool dissipation_ok = false;

  bool passed() const { return energy_ok && dissipation_ok; }
};

/// Needs at least 30 paths over the same grid.
AprioriReport apriori_check(std::span<const PathSegment> paths, const CoefficientSpec& coeff);

// ---------------------------------------------------------------------------
// Cutoff-capped quantities of the outer iteration

struct XiCapReport {
  std::vector<double> series;  // Xi_n(t_k)
  double integral = 0.0;
  double cap = 0.0;            // 18 delta^2 + 2 * overshoot
  double overshoot = 0.0;      // dt * max_k ||y_k||^2
  bool passed = false;
};

/// Xi_n(t) = ||y_{n-1}||^2 1{|y_{n-1}|_xi <= 3 delta} + ||y_n||^2 1{|y_n|_xi <= 3 delta}.
XiCapReport xi_cap_check(const PathSegment& prev, const PathSegment& cur, double delta);

struct EnvelopeParams {
  double eps = 0.5;
  double p = 1.0;
  double constant = 1.0;
};

struct InReport {
  std::vector<double> values;
  std::vector<double> envelope;
  double integral = 0.0;
  double violation_fraction = 0.0;
};

/// I_n(t) = <B(y_n, y_{n+1}) c_n - B(y_{n-1}, y_n) c_{n-1}, y_{n+1} - y_n>
/// with c = phi_m(|y|) g_delta(|y|_xi), and the bounding envelope evaluated
/// with the given (eps, p, constant).
InReport in_diagnostic(const PathSegment& prev, const PathSegment& cur, const PathSegment& next,
                       const ModelSpec& model, const Cutoff& cutoff, const EnvelopeParams& env);

/// Smallest envelope constant for which I_n stays under the envelope at every
/// grid point (0 when the constant-free part already dominates).
double calibrate_envelope_constant(const PathSegment& prev, const PathSegment& cur, const PathSegment& next,
                                   const ModelSpec& model, const Cutoff& cutoff, double eps, double p);

// ---------------------------------------------------------------------------
// Contraction of the outer iteration over an ensemble

struct ContractionReport {
  std::size_t paths = 0;
  std::vector<double> a;        // sqrt(mean int ||y_{n+1} - y_n||^2)
  std::vector<double> b;        // mean sup |y_{n+1} - y_n|
  std::vector<double> ratio_a;  // a[n+1] / a[n]
  std::vector<double> ratio_b;
  std::vector<double> partial_a;  // sum_{j=2}^{n} a[j]
  std::vector<double> partial_b;
};

/// Iterations that stopped early count as zero increments.
ContractionReport contraction_report(std::span<const IterationReport> reports);

}  // namespace levyspde
