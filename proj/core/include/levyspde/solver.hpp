#pragma once

#include <optional>
#include <stdexcept>

#include "levyspde/cutoff.hpp"
#include "levyspde/diagnostics.hpp"
#include "levyspde/solver_types.hpp"

namespace levyspde {

class PicardDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InnerIterationDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One step of the frozen-coefficient scheme on grid step k:
///   x = y + dt (-c B(a, y) + f) + Psi(t_k, s) dW_k + sum_jumps G(t_k, s, z) - dt int G(t_k, s, z) nu(dz)
///   y_next = R x
/// where s is the state the noise coefficients are evaluated at and R is the
/// resolvent or the semigroup over dt. c == 0 skips the B evaluation.
GalerkinVector scheme_step(const GalerkinVector& y, const GalerkinVector& noise_arg, const GalerkinVector& advecting,
                           double c, std::size_t k, const System& sys, Stepper stepper);

/// Linearised step with c = phi_m(|a|) g_delta(a_xi); noise coefficients at y.
GalerkinVector linear_step(const GalerkinVector& y, const GalerkinVector& advecting, double advecting_xi,
                           std::size_t k, const System& sys, const Cutoff& cutoff, Stepper stepper);

/// Path of the linear equation advected by a frozen path (the map y -> Theta^y),
/// starting from u0 at the advecting path's first grid point.
PathSegment solve_linearized(const PathSegment& advecting, const GalerkinVector& u0, const System& sys,
                             const SolverConfig& cfg, const Cutoff& cutoff);

struct InnerResult {
  PathSegment path;
  std::size_t passes = 0;
  std::vector<double> increments;  // sup_k |h_{j+1} - h_j|
};

/// h_{j+1} solves the linearised equation with noise coefficients frozen on
/// h_j, from h_0(t) = exp(-A t) u0, until sup|h_{j+1} - h_j| <= tol_inner.
InnerResult inner_h_iteration(const PathSegment& advecting, const GalerkinVector& u0, const System& sys,
                              const SolverConfig& cfg, const Cutoff& cutoff);

struct PicardResult {
  PathSegment path;
  IterationReport report;
};

/// Outer iteration y_{n+1} = Theta^{y_n} from y_0 == 0 on grid steps
/// [step_begin, step_end], restarted from u0 at step_begin.
PicardResult picard_local(const GalerkinVector& u0, std::size_t step_begin, std::size_t step_end, const System& sys,
                          const SolverConfig& cfg, const Cutoff& cutoff);

/// Local windows patched at the first grid time where the xi-norm since the
/// window start reaches delta0 (or after T0), at fixed cutoff level m.
SolveOutcome concatenate_m_solution(const GalerkinVector& u0, const System& sys, const SolverConfig& cfg, double m);

/// Raises m by m_growth until the path stays below m on the whole grid.
SolveOutcome global_solve(const GalerkinVector& u0, const System& sys, const SolverConfig& cfg);

/// Direct semi-implicit Euler-Maruyama with B(y_k, y_k), weighted by
/// phi_m(|y_k|) when m is given.
PathSegment baseline_direct(const GalerkinVector& u0, const System& sys, const SolverConfig& cfg,
                            std::optional<double> m);

double sup_h_norm(const PathSegment& path);
double sup_distance(const PathSegment& a, const PathSegment& b);

}  // namespace levyspde
