#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "levyspde/models.hpp"
#include "levyspde/noise.hpp"
#include "levyspde/spaces.hpp"

namespace levyspde {

enum class Stepper { resolvent, exponential };
enum class InnerMode { direct, h_iteration };

std::string to_string(Stepper s);
std::string to_string(InnerMode m);
Stepper stepper_from_string(const std::string& s);
InnerMode inner_mode_from_string(const std::string& s);

struct SolverConfig {
  double T = 1.0;
  double dt = 0.01;
  double tol_picard = 1e-10;
  std::size_t max_picard = 60;
  double T0 = 0.1;
  double delta0 = 0.5;
  double m = 10.0;
  double m_growth = 2.0;
  std::size_t max_m_escalations = 8;
  Stepper stepper = Stepper::resolvent;
  InnerMode inner_mode = InnerMode::direct;
  std::size_t max_inner = 50;
  double tol_inner = 1e-12;
  /// Ceiling on the accumulated int ||u||^2; exceeding it is treated as blow-up.
  double xi_ceiling = 1e12;
  std::size_t max_T0_halvings = 4;
  /// Record I_n and Xi_n integrals in iteration reports.
  bool record_diagnostics = true;

  void validate() const;
  TimeGrid grid() const { return TimeGrid::over(T, dt); }
};

/// Everything a path solve reads: the model, the coefficients and one frozen
/// noise path. Non-owning.
struct System {
  const ModelSpec& model;
  const CoefficientSpec& coeff;
  const NoiseRealization& noise;
};

/// Increment y_{n+1} - y_n of one outer iteration.
struct IterationRecord {
  std::size_t n = 0;
  double sup_increment = 0.0;
  double xi_increment = 0.0;
  double in_integral = 0.0;
  double xi_integral = 0.0;
};

struct IterationReport {
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<IterationRecord> records;
  bool converged = false;
  std::size_t iterations_used = 0;
};

struct SolveOutcome {
  PathSegment trajectory;
  std::vector<double> stop_times;
  double m_final = 0.0;
  std::size_t escalations = 0;
  bool blowup_flag = false;
  std::string blowup_reason;
  std::uint64_t seed = 0;
  std::vector<IterationReport> windows;
};

}  // namespace levyspde
