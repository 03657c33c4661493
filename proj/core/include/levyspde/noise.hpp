#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyspde/spaces.hpp"

namespace levyspde {

/// Raised when declared noise constants violate the growth/Lipschitz
/// admissibility condition L2, L5 in [0, 2).
class ConditionViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class LevyFamily { compound_gaussian, truncated_power };

/// Finite Levy measure on scalar marks z != 0.
///
/// compound_gaussian: nu = rate * N(mean, sd^2).
/// truncated_power:   nu(dz) = c |z|^{-1-alpha} dz on eps_low <= |z| <= r_high (symmetric).
class LevyMeasure {
 public:
  static LevyMeasure compound_gaussian(double rate, double mean, double sd);
  static LevyMeasure truncated_power(double c, double alpha, double eps_low, double r_high);
  static LevyMeasure none() { return compound_gaussian(0.0, 0.0, 1.0); }

  LevyFamily family() const { return family_; }
  double total_mass() const { return total_mass_; }
  double m1() const { return m1_; }
  double m2() const { return m2_; }
  bool symmetric() const { return m1_ == 0.0; }

  // family parameters
  double rate() const { return p_[0]; }
  double mean() const { return p_[1]; }
  double sd() const { return p_[2]; }
  double power_c() const { return p_[0]; }
  double alpha() const { return p_[1]; }
  double eps_low() const { return p_[2]; }
  double r_high() const { return p_[3]; }

  /// Draw a mark from the normalised measure nu / nu(Z).
  double sample_mark(std::mt19937_64& rng) const;

  /// Quadrature of int f(z) nu(dz): trapezoid over +-14 sd for the Gaussian
  /// family (spectrally accurate), Simpson in log|z| for the power family.
  double integrate(const std::function<double(double)>& f) const;

 private:
  LevyMeasure() = default;
  LevyFamily family_ = LevyFamily::compound_gaussian;
  double p_[4] = {0, 0, 0, 0};
  double total_mass_ = 0.0;
  double m1_ = 0.0;
  double m2_ = 0.0;
};

struct WienerDriverSpec {
  std::size_t dims = 0;
};

struct Jump {
  double time = 0.0;
  double mark = 0.0;
  std::size_t step = 0;

  friend bool operator==(const Jump&, const Jump&) = default;
};

/// Frozen Wiener increments and Poisson jumps on a time grid.
class NoiseRealization {
 public:
  NoiseRealization(TimeGrid grid, std::size_t wiener_dims, std::vector<double> wiener_flat,
                   std::vector<Jump> jumps, std::uint64_t seed);

  /// No Wiener increments, no jumps.
  static NoiseRealization zero(TimeGrid grid, std::size_t wiener_dims = 0);

  const TimeGrid& grid() const { return grid_; }
  std::size_t wiener_dims() const { return dims_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Jump>& jumps() const { return jumps_; }

  std::span<const double> wiener_increment(std::size_t step) const;
  std::span<const Jump> jumps_in_step(std::size_t step) const;

  /// Same driving path on a grid coarser by an integer factor: Wiener
  /// increments summed, jumps re-binned by time.
  NoiseRealization coarsen(std::size_t factor) const;

  friend bool operator==(const NoiseRealization&, const NoiseRealization&);

 private:
  TimeGrid grid_;
  std::size_t dims_;
  std::vector<double> wiener_;
  std::vector<Jump> jumps_;
  std::vector<std::size_t> step_offsets_;
  std::uint64_t seed_;
};

/// Step index of a jump time in (0, T]: t in (t_k, t_{k+1}] maps to k.
std::size_t step_of(const TimeGrid& grid, double t);

/// Independent stream seed for a path index (splitmix64 finaliser).
std::uint64_t path_seed(std::uint64_t base, std::uint64_t index);

NoiseRealization sample_realization(const TimeGrid& grid, const LevyMeasure& measure,
                                    const WienerDriverSpec& wiener, std::uint64_t seed);

/// Textual replay format (17 significant digits, exact round trip).
void write_realization_csv(std::ostream& os, const NoiseRealization& noise);
NoiseRealization read_realization_csv(std::istream& is);

// ---------------------------------------------------------------------------

enum class CoefficientFamily { none, additive, diagonal, gradient };

std::string to_string(CoefficientFamily f);
CoefficientFamily coefficient_family_from_string(const std::string& s);

/// One coefficient family. sigma is per mode: a single value is broadcast over
/// the first active_modes modes (0 = all), a longer list is taken mode by mode.
struct FamilySpec {
  CoefficientFamily family = CoefficientFamily::none;
  std::vector<double> sigma{0.0};
  double theta = 0.0;
  std::size_t active_modes = 0;
};

struct NoiseConstants {
  double l1 = 0, l2 = 0, l3 = 0, l4 = 0, l5 = 0;
};

/// Closed-form L1..L5 for jump family (G) and Wiener family (Psi). Throws
/// ConditionViolation when L2 >= 2 or L5 >= 2.
NoiseConstants certify_constants(const FamilySpec& jump, const FamilySpec& wiener,
                                 const LevyMeasure& measure, const SpectralBasis& basis,
                                 std::size_t wiener_dims);

/// Noise coefficients G (jumps) and Psi (Wiener) bound to a basis and a Levy
/// measure, plus the constant-in-time forcing f. Time-homogeneous families;
/// t is accepted for interface stability.
class CoefficientSpec {
 public:
  CoefficientSpec(FamilySpec jump, FamilySpec wiener, LevyMeasure measure, SpectralBasis basis,
                  std::size_t wiener_dims, std::vector<double> forcing = {});

  const NoiseConstants& constants() const { return constants_; }
  const LevyMeasure& measure() const { return measure_; }
  const SpectralBasis& basis() const { return basis_; }
  const FamilySpec& jump_family() const { return jump_; }
  const FamilySpec& wiener_family() const { return wiener_; }
  std::size_t wiener_dims() const { return wiener_dims_; }

  /// G(t, v, z).
  GalerkinVector eval_G(double t, const GalerkinVector& v, double z) const;
  /// G(t, v, 1); every family is linear in the mark.
  GalerkinVector jump_action(double t, const GalerkinVector& v) const;
  /// Psi(t, v) dW.
  GalerkinVector eval_Psi_apply(double t, const GalerkinVector& v, std::span<const double> dw) const;
  /// ||Psi(t, v)||^2 in the Hilbert-Schmidt norm.
  double psi_hs_norm_sq(double t, const GalerkinVector& v) const;
  /// int_Z G(t, v, z) nu(dz) = m1 * G(t, v, 1).
  GalerkinVector compensator_drift(double t, const GalerkinVector& v) const;
  const GalerkinVector& forcing(double t) const;
  bool has_noise() const;

 private:
  double factor(const FamilySpec& f, const std::vector<double>& sig, std::size_t j, double vj) const;

  FamilySpec jump_;
  FamilySpec wiener_;
  LevyMeasure measure_;
  SpectralBasis basis_;
  std::size_t wiener_dims_;
  std::vector<double> jump_sigma_;
  std::vector<double> wiener_sigma_;
  GalerkinVector forcing_;
  NoiseConstants constants_;
};

struct ConditionReport {
  std::size_t samples = 0;
  double max_ratio_lipschitz = 0.0;
  double max_ratio_growth = 0.0;
  double tolerance = 1e-9;
  bool passed() const { return max_ratio_lipschitz <= 1.0 + tolerance && max_ratio_growth <= 1.0 + tolerance; }
};

/// Samples (v1, v2) and compares the Lipschitz and growth left-hand sides
/// (jump part by quadrature over nu) with the declared constants.
ConditionReport empirical_condition_check(const CoefficientSpec& coeff, std::size_t samples, std::uint64_t seed);

/// Random vector with Gaussian coefficients damped by wavenumber^{-decay}.
GalerkinVector random_vector(const SpectralBasis& basis, std::mt19937_64& rng, double decay = 0.0);

}  // namespace levyspde
