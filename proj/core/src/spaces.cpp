#include "levyspde/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace levyspde {

SpectralBasis::SpectralBasis(std::vector<double> eigenvalues, double viscosity)
    : viscosity_(viscosity) {
  if (eigenvalues.empty()) throw DimensionError("SpectralBasis: dimension must be >= 1");
  if (!(viscosity > 0.0) || !std::isfinite(viscosity))
    throw std::invalid_argument("SpectralBasis: viscosity must be positive");
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    if (!(eigenvalues[k] > 0.0) || !std::isfinite(eigenvalues[k]))
      throw std::invalid_argument("SpectralBasis: eigenvalue " + std::to_string(k) +
                                  " is not strictly positive");
    if (k > 0 && eigenvalues[k] < eigenvalues[k - 1])
      throw std::invalid_argument("SpectralBasis: eigenvalues must be nondecreasing");
  }
  eig_ = std::make_shared<const std::vector<double>>(std::move(eigenvalues));
}

double SpectralBasis::wavenumber(std::size_t k) const {
  return std::sqrt((*eig_)[k] / viscosity_);
}

GalerkinVector::GalerkinVector(std::size_t dim) : c_(dim, 0.0) {
  if (dim == 0) throw DimensionError("GalerkinVector: dimension must be >= 1");
}

GalerkinVector::GalerkinVector(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) throw DimensionError("GalerkinVector: dimension must be >= 1");
  if (!is_finite()) throw NonFiniteError("GalerkinVector: non-finite coefficient");
}

GalerkinVector GalerkinVector::unit(std::size_t dim, std::size_t k) {
  GalerkinVector e(dim);
  if (k >= dim) throw DimensionError("GalerkinVector::unit: index out of range");
  e[k] = 1.0;
  return e;
}

bool GalerkinVector::is_finite() const {
  return std::all_of(c_.begin(), c_.end(), [](double x) { return std::isfinite(x); });
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
}

GalerkinVector& GalerkinVector::operator+=(const GalerkinVector& o) {
  require_same_dim(dim(), o.dim(), "operator+=");
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

GalerkinVector& GalerkinVector::operator-=(const GalerkinVector& o) {
  require_same_dim(dim(), o.dim(), "operator-=");
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

GalerkinVector& GalerkinVector::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

GalerkinVector& GalerkinVector::axpy(double a, const GalerkinVector& x) {
  require_same_dim(dim(), x.dim(), "axpy");
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += a * x.c_[k];
  return *this;
}

GalerkinVector operator+(GalerkinVector a, const GalerkinVector& b) { return a += b; }
GalerkinVector operator-(GalerkinVector a, const GalerkinVector& b) { return a -= b; }
GalerkinVector operator*(double s, GalerkinVector a) { return a *= s; }

double dot(const GalerkinVector& a, const GalerkinVector& b) {
  require_same_dim(a.dim(), b.dim(), "dot");
  double s = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) s += a[k] * b[k];
  return s;
}

double h_norm(const GalerkinVector& v) { return std::sqrt(dot(v, v)); }

double v_norm_sq(const GalerkinVector& v, const SpectralBasis& basis) {
  require_same_dim(v.dim(), basis.dim(), "v_norm");
  double s = 0.0;
  for (std::size_t k = 0; k < v.dim(); ++k) s += basis.eigenvalue(k) * v[k] * v[k];
  return s;
}

double v_norm(const GalerkinVector& v, const SpectralBasis& basis) {
  return std::sqrt(v_norm_sq(v, basis));
}

double dual_norm(const GalerkinVector& f, const SpectralBasis& basis) {
  require_same_dim(f.dim(), basis.dim(), "dual_norm");
  double s = 0.0;
  for (std::size_t k = 0; k < f.dim(); ++k) s += f[k] * f[k] / basis.eigenvalue(k);
  return std::sqrt(s);
}

GalerkinVector resolvent_step(const GalerkinVector& v, const SpectralBasis& basis, double dt) {
  require_same_dim(v.dim(), basis.dim(), "resolvent_step");
  if (!(dt > 0.0)) throw std::invalid_argument("resolvent_step: dt must be positive");
  GalerkinVector out = v;
  for (std::size_t k = 0; k < v.dim(); ++k) out[k] = v[k] / (1.0 + dt * basis.eigenvalue(k));
  return out;
}

GalerkinVector semigroup_step(const GalerkinVector& v, const SpectralBasis& basis, double dt) {
  require_same_dim(v.dim(), basis.dim(), "semigroup_step");
  if (!(dt >= 0.0)) throw std::invalid_argument("semigroup_step: dt must be nonnegative");
  GalerkinVector out = v;
  for (std::size_t k = 0; k < v.dim(); ++k) out[k] = v[k] * std::exp(-dt * basis.eigenvalue(k));
  return out;
}

std::size_t TimeGrid::index_of(double t) const {
  const double x = (t - t0) / dt;
  const double r = std::round(x);
  if (r < 0.0 || r > static_cast<double>(steps) || std::abs(x - r) > 1e-9)
    throw std::out_of_range("time " + std::to_string(t) + " is not on the grid");
  return static_cast<std::size_t>(r);
}

TimeGrid TimeGrid::over(double horizon, double dt, double t0) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("TimeGrid: dt and T must be positive");
  const double n = horizon / dt;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n))
    throw std::invalid_argument("TimeGrid: T must be an integer multiple of dt");
  return TimeGrid{t0, dt, static_cast<std::size_t>(r)};
}

PathSegment::PathSegment(double t_start, double dt, SpectralBasis basis, GalerkinVector initial)
    : t_start_(t_start), dt_(dt), basis_(std::move(basis)) {
  if (!(dt > 0.0)) throw std::invalid_argument("PathSegment: dt must be positive");
  require_same_dim(initial.dim(), basis_.dim(), "PathSegment");
  states_.push_back(std::move(initial));
  xi_sq_.push_back(0.0);
}

void PathSegment::append(GalerkinVector next) {
  require_same_dim(next.dim(), basis_.dim(), "PathSegment::append");
  xi_sq_.push_back(xi_sq_.back() + dt_ * v_norm_sq(states_.back(), basis_));
  states_.push_back(std::move(next));
}

PathSegment PathSegment::slice(std::size_t first, std::size_t last) const {
  if (first > last || last >= size()) throw std::out_of_range("PathSegment::slice");
  PathSegment out(time(first), dt_, basis_, states_[first]);
  for (std::size_t k = first + 1; k <= last; ++k) out.append(states_[k]);
  return out;
}

double xi_norm(const PathSegment& path, double t) {
  const TimeGrid grid{path.t_start(), path.dt(), path.steps()};
  return std::sqrt(path.xi_sq(grid.index_of(t)));
}

PathSegment concatenate(const PathSegment& a, const PathSegment& b) {
  if (std::abs(a.t_end() - b.t_start()) > 1e-9 * a.dt() || std::abs(a.dt() - b.dt()) > 1e-15 * a.dt())
    throw std::invalid_argument("concatenate: segments are not contiguous on one grid");
  if (!(a.back() == b.front())) throw std::invalid_argument("concatenate: endpoint states differ");
  PathSegment out = a;
  for (std::size_t k = 1; k < b.size(); ++k) out.append(b.state(k));
  return out;
}

PathSegment zero_path(double t_start, double dt, std::size_t steps, const SpectralBasis& basis) {
  PathSegment out(t_start, dt, basis, GalerkinVector(basis.dim()));
  for (std::size_t k = 0; k < steps; ++k) out.append(GalerkinVector(basis.dim()));
  return out;
}

}  // namespace levyspde
