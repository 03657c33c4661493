#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyspde {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenvalues of the diagonal operator A in the working basis.
///
/// The eigenvalue table is shared between copies; a basis is an immutable
/// value. The viscosity is carried so that coefficient families acting at
/// derivative order can recover wavenumbers k_j = sqrt(lambda_j / nu).
class SpectralBasis {
 public:
  explicit SpectralBasis(std::vector<double> eigenvalues, double viscosity = 1.0);

  std::size_t dim() const { return eig_->size(); }
  std::span<const double> eigenvalues() const { return *eig_; }
  double eigenvalue(std::size_t k) const { return (*eig_)[k]; }
  double lambda_min() const { return eig_->front(); }
  double lambda_max() const { return eig_->back(); }
  double viscosity() const { return viscosity_; }
  double wavenumber(std::size_t k) const;

 private:
  std::shared_ptr<const std::vector<double>> eig_;
  double viscosity_;
};

/// Coordinates of a state in the eigenbasis of A.
class GalerkinVector {
 public:
  /// Zero vector of the given dimension.
  explicit GalerkinVector(std::size_t dim);
  /// Throws DimensionError when empty and NonFiniteError on NaN/Inf.
  explicit GalerkinVector(std::vector<double> coeffs);

  static GalerkinVector unit(std::size_t dim, std::size_t k);

  std::size_t dim() const { return c_.size(); }
  double operator[](std::size_t k) const { return c_[k]; }
  double& operator[](std::size_t k) { return c_[k]; }
  std::span<const double> coeffs() const { return c_; }
  std::span<double> coeffs() { return c_; }

  bool is_finite() const;

  GalerkinVector& operator+=(const GalerkinVector& o);
  GalerkinVector& operator-=(const GalerkinVector& o);
  GalerkinVector& operator*=(double s);
  /// this += a * x
  GalerkinVector& axpy(double a, const GalerkinVector& x);

  friend bool operator==(const GalerkinVector&, const GalerkinVector&) = default;

 private:
  std::vector<double> c_;
};

GalerkinVector operator+(GalerkinVector a, const GalerkinVector& b);
GalerkinVector operator-(GalerkinVector a, const GalerkinVector& b);
GalerkinVector operator*(double s, GalerkinVector a);

void require_same_dim(std::size_t a, std::size_t b, const char* what);

double dot(const GalerkinVector& a, const GalerkinVector& b);

double h_norm(const GalerkinVector& v);
double v_norm(const GalerkinVector& v, const SpectralBasis& basis);
double v_norm_sq(const GalerkinVector& v, const SpectralBasis& basis);
double dual_norm(const GalerkinVector& f, const SpectralBasis& basis);

/// (I + dt A)^{-1} v. Requires dt > 0.
GalerkinVector resolvent_step(const GalerkinVector& v, const SpectralBasis& basis, double dt);
/// exp(-dt A) v. Requires dt >= 0.
GalerkinVector semigroup_step(const GalerkinVector& v, const SpectralBasis& basis, double dt);

/// Uniform time grid t_k = t0 + k dt, k = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;

  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double horizon() const { return time(steps); }
  /// Index of a grid time; throws std::out_of_range when t is not on the grid.
  std::size_t index_of(double t) const;

  static TimeGrid over(double horizon, double dt, double t0 = 0.0);
};

/// A gridded path with its running xi-norm cache.
///
/// xi_sq(k) is the left-Riemann sum of dt * ||y_j||^2 for j < k, measured
/// from the first grid point of the segment.
class PathSegment {
 public:
  PathSegment(double t_start, double dt, SpectralBasis basis, GalerkinVector initial);

  void append(GalerkinVector next);

  std::size_t size() const { return states_.size(); }
  std::size_t steps() const { return states_.size() - 1; }
  double dt() const { return dt_; }
  double t_start() const { return t_start_; }
  double time(std::size_t k) const { return t_start_ + static_cast<double>(k) * dt_; }
  double t_end() const { return time(steps()); }
  const SpectralBasis& basis() const { return basis_; }

  const GalerkinVector& state(std::size_t k) const { return states_[k]; }
  const GalerkinVector& front() const { return states_.front(); }
  const GalerkinVector& back() const { return states_.back(); }
  const std::vector<GalerkinVector>& states() const { return states_; }

  double xi_sq(std::size_t k) const { return xi_sq_[k]; }
  std::span<const double> xi_sq_running() const { return xi_sq_; }

  /// Sub-path over indices [first, last], xi cache restarted at zero.
  PathSegment slice(std::size_t first, std::size_t last) const;

 private:
  double t_start_;
  double dt_;
  SpectralBasis basis_;
  std::vector<GalerkinVector> states_;
  std::vector<double> xi_sq_;
};

/// |y|_{xi_t} for a grid time t of the segment.
double xi_norm(const PathSegment& path, double t);

/// Joins b onto a; b must start where a ends (same time and state).
PathSegment concatenate(const PathSegment& a, const PathSegment& b);

/// Identically zero path over steps+1 grid points.
PathSegment zero_path(double t_start, double dt, std::size_t steps, const SpectralBasis& basis);

}  // namespace levyspde
