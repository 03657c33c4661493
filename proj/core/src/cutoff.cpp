#include "levyspde/cutoff.hpp"

#include <cmath>
#include <stdexcept>

namespace levyspde {

double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

double smoothstep_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double q = s * (1.0 - s);
  return 30.0 * q * q;
}

Cutoff::Cutoff(double m, double delta) : m_(m), delta_(delta) {
  if (!(m > 0.0) || !(delta > 0.0)) throw std::invalid_argument("Cutoff: m and delta must be positive");
}

}  // namespace levyspde
