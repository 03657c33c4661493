#pragma once

namespace levyspde {

/// Quintic C^2 bridge: 0 for s <= 0, 1 for s >= 1, 6s^5 - 15s^4 + 10s^3 between.
double smoothstep(double s);
double smoothstep_derivative(double s);

/// The pair phi_m (H-norm cutoff, plateau [0, m], zero from m+1) and g_delta
/// (xi-norm cutoff, plateau [0, delta], zero from 2 delta).
class Cutoff {
 public:
  /// sup |phi_m'|, independent of m.
  static constexpr double kPhiSlope = 15.0 / 8.0;
  /// K in sup |g_delta'| <= K / delta.
  static constexpr double kGSlope = 15.0 / 8.0;

  Cutoff(double m, double delta);

  double m() const { return m_; }
  double delta() const { return delta_; }

  double phi(double x) const { return 1.0 - smoothstep(x - m_); }
  double g(double x) const { return 1.0 - smoothstep((x - delta_) / delta_); }
  double phi_derivative(double x) const { return -smoothstep_derivative(x - m_); }
  double g_derivative(double x) const { return -smoothstep_derivative((x - delta_) / delta_) / delta_; }

 private:
  double m_;
  double delta_;
};

}  // namespace levyspde
