#include "levyspde/models.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace levyspde {

ModelSpec::ModelSpec(std::string name, SpectralBasis basis, double a0, double c_b)
    : name_(std::move(name)), basis_(std::move(basis)), a0_(a0), c_b_(c_b) {
  if (!(a0 > 0.0) || !(c_b > 0.0)) throw std::invalid_argument("ModelSpec: a0 and C_b must be positive");
}

void ModelSpec::check_dims(const GalerkinVector& v, const char* what) const {
  require_same_dim(v.dim(), dim(), what);
}

// ---------------------------------------------------------------------------

void DyadicShellParams::validate() const {
  if (modes < 1) throw std::invalid_argument("dyadic: modes must be >= 1");
  if (!(k0 > 1.0)) throw std::invalid_argument("dyadic: k0 must exceed 1");
  if (!(visc > 0.0)) throw std::invalid_argument("dyadic: visc must be positive");
}

double DyadicShellParams::wavenumber(std::size_t n) const {
  return k0 * std::ldexp(1.0, static_cast<int>(n));
}

double dyadic_trilinear(const GalerkinVector& u, const GalerkinVector& v, const GalerkinVector& w,
                        const DyadicShellParams& params) {
  const std::size_t n_modes = params.modes;
  require_same_dim(u.dim(), n_modes, "dyadic_trilinear");
  require_same_dim(v.dim(), n_modes, "dyadic_trilinear");
  require_same_dim(w.dim(), n_modes, "dyadic_trilinear");
  double s = 0.0;
  for (std::size_t n = 0; n + 1 < n_modes; ++n)
    s += params.wavenumber(n) * u[n] * (v[n] * w[n + 1] - v[n + 1] * w[n]);
  return s;
}

ModelConstants dyadic_certify(const DyadicShellParams& params) {
  params.validate();
  const double sq = std::sqrt(params.visc);
  return ModelConstants{1.0 / (sq * params.wavenumber(0)), 2.0 / sq};
}

SpectralBasis dyadic_basis(const DyadicShellParams& p) {
  p.validate();
  std::vector<double> eig(p.modes);
  for (std::size_t n = 0; n < p.modes; ++n) eig[n] = p.visc * p.wavenumber(n) * p.wavenumber(n);
  return SpectralBasis(std::move(eig), p.visc);
}

DyadicShell::DyadicShell(const DyadicShellParams& params)
    : DyadicShell(params, dyadic_certify(params)) {}

DyadicShell::DyadicShell(const DyadicShellParams& params, ModelConstants declared)
    : ModelSpec("dyadic", dyadic_basis(params), declared.a0, declared.c_b), params_(params) {
  k_.resize(params.modes);
  for (std::size_t n = 0; n < params.modes; ++n) k_[n] = params.wavenumber(n);
}

double DyadicShell::trilinear(const GalerkinVector& u, const GalerkinVector& v,
                              const GalerkinVector& w) const {
  return dyadic_trilinear(u, v, w, params_);
}

GalerkinVector DyadicShell::apply(const GalerkinVector& u, const GalerkinVector& v) const {
  check_dims(u, "DyadicShell::apply");
  check_dims(v, "DyadicShell::apply");
  const std::size_t n = dim();
  GalerkinVector out(n);
  for (std::size_t m = 0; m < n; ++m) {
    double s = 0.0;
    if (m >= 1) s += k_[m - 1] * u[m - 1] * v[m - 1];
    if (m + 1 < n) s -= k_[m] * u[m] * v[m + 1];
    out[m] = s;
  }
  return out;
}

double DyadicShell::q_norm(const GalerkinVector& v) const {
  check_dims(v, "DyadicShell::q_norm");
  return h_norm(v);
}

// ---------------------------------------------------------------------------

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Normalisation of the real basis functions on [0, 2 pi]^2.
const double kModeNorm = 1.0 / (std::numbers::pi * std::numbers::sqrt2);

bool is_smooth_size(int n) {
  for (int p : {2, 3, 5}) while (n % p == 0) n /= p;
  return n == 1;
}

}  // namespace

void Nse2dParams::validate() const {
  if (modes_per_axis < 1) throw std::invalid_argument("nse2d: modes_per_axis must be >= 1");
  if (!(visc > 0.0)) throw std::invalid_argument("nse2d: visc must be positive");
}

std::vector<FourierMode> nse_mode_table(int m) {
  std::vector<FourierMode> modes;
  for (int kx = 0; kx <= m; ++kx)
    for (int ky = -m; ky <= m; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      modes.push_back({kx, ky, false});
      modes.push_back({kx, ky, true});
    }
  std::stable_sort(modes.begin(), modes.end(), [](const FourierMode& a, const FourierMode& b) {
    const int na = a.kx * a.kx + a.ky * a.ky;
    const int nb = b.kx * b.kx + b.ky * b.ky;
    if (na != nb) return na < nb;
    if (a.kx != b.kx) return a.kx < b.kx;
    if (a.ky != b.ky) return a.ky < b.ky;
    return a.is_sine < b.is_sine;
  });
  return modes;
}

int nse_grid_size(const Nse2dParams& params) {
  int n = params.dealias ? 3 * params.modes_per_axis + 1 : 2 * params.modes_per_axis + 1;
  while (!is_smooth_size(n)) ++n;
  return n;
}

namespace {

SpectralBasis nse_basis(const Nse2dParams& p, const std::vector<FourierMode>& modes) {
  p.validate();
  std::vector<double> eig;
  eig.reserve(modes.size());
  for (const auto& md : modes) eig.push_back(p.visc * (md.kx * md.kx + md.ky * md.ky));
  return SpectralBasis(std::move(eig), p.visc);
}

}  // namespace

SpectralBasis nse_basis(const Nse2dParams& p) { return nse_basis(p, nse_mode_table(p.modes_per_axis)); }

Nse2d::Nse2d(const Nse2dParams& params, double a0)
    : ModelSpec("nse2d", nse_basis(params, nse_mode_table(params.modes_per_axis)), a0,
                1.0 / std::sqrt(params.visc)),
      params_(params),
      modes_(nse_mode_table(params.modes_per_axis)),
      ng_(nse_grid_size(params)) {
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(ng_) * ng_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  plan_backward_ = fftw_plan_dft_2d(ng_, ng_, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_forward_ = fftw_plan_dft_2d(ng_, ng_, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Nse2d::~Nse2d() {
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
}

std::size_t Nse2d::slot(int kx, int ky) const {
  const int ix = ((kx % ng_) + ng_) % ng_;
  const int iy = ((ky % ng_) + ng_) % ng_;
  return static_cast<std::size_t>(ix) * ng_ + iy;
}

void Nse2d::spectral(const GalerkinVector& v, Field& fx, Field& fy) const {
  const std::size_t n = static_cast<std::size_t>(ng_) * ng_;
  fx.assign(n, {0.0, 0.0});
  fy.assign(n, {0.0, 0.0});
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    if (v[j] == 0.0) continue;
    const auto& md = modes_[j];
    const double len = std::hypot(md.kx, md.ky);
    const double px = -md.ky / len;
    const double py = md.kx / len;
    const double h = 0.5 * kModeNorm * v[j];
    const std::complex<double> plus = md.is_sine ? std::complex<double>(0.0, -h) : std::complex<double>(h, 0.0);
    const std::complex<double> minus = std::conj(plus);
    const std::size_t sp = slot(md.kx, md.ky);
    const std::size_t sm = slot(-md.kx, -md.ky);
    fx[sp] += plus * px;
    fy[sp] += plus * py;
    fx[sm] += minus * px;
    fy[sm] += minus * py;
  }
}

void Nse2d::to_physical(Field& f) const {
  auto* p = reinterpret_cast<fftw_complex*>(f.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), p, p);
}

void Nse2d::to_spectral(Field& f) const {
  auto* p = reinterpret_cast<fftw_complex*>(f.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), p, p);
}

void Nse2d::velocity_on_grid(const GalerkinVector& v, std::vector<double>& ux,
                             std::vector<double>& uy) const {
  check_dims(v, "Nse2d::velocity_on_grid");
  Field fx, fy;
  spectral(v, fx, fy);
  to_physical(fx);
  to_physical(fy);
  ux.resize(fx.size());
  uy.resize(fy.size());
  for (std::size_t i = 0; i < fx.size(); ++i) {
    ux[i] = fx[i].real();
    uy[i] = fy[i].real();
  }
}

void Nse2d::gradient_on_grid(const GalerkinVector& v, Field (&g)[2][2]) const {
  Field fx, fy;
  spectral(v, fx, fy);
  const std::size_t n = fx.size();
  for (auto& row : g)
    for (auto& f : row) f.assign(n, {0.0, 0.0});
  for (int ix = 0; ix < ng_; ++ix) {
    const double kx = signed_index(ix);
    for (int iy = 0; iy < ng_; ++iy) {
      const std::size_t s = static_cast<std::size_t>(ix) * ng_ + iy;
      if (fx[s] == 0.0 && fy[s] == 0.0) continue;
      const double ky = signed_index(iy);
      const std::complex<double> ikx(0.0, kx), iky(0.0, ky);
      g[0][0][s] = ikx * fx[s];
      g[0][1][s] = ikx * fy[s];
      g[1][0][s] = iky * fx[s];
      g[1][1][s] = iky * fy[s];
    }
  }
  for (auto& row : g)
    for (auto& f : row) to_physical(f);
}

void Nse2d::advection_on_grid(const GalerkinVector& u, const GalerkinVector& v, Field& nx, Field& ny) const {
  Field ux, uy;
  spectral(u, ux, uy);
  to_physical(ux);
  to_physical(uy);
  Field g[2][2];
  gradient_on_grid(v, g);
  const std::size_t n = ux.size();
  nx.assign(n, {0.0, 0.0});
  ny.assign(n, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    const double a = ux[i].real();
    const double b = uy[i].real();
    nx[i] = a * g[0][0][i].real() + b * g[1][0][i].real();
    ny[i] = a * g[0][1][i].real() + b * g[1][1][i].real();
  }
}

double Nse2d::trilinear(const GalerkinVector& u, const GalerkinVector& v, const GalerkinVector& w) const {
  check_dims(u, "Nse2d::trilinear");
  check_dims(v, "Nse2d::trilinear");
  check_dims(w, "Nse2d::trilinear");
  Field nx, ny;
  advection_on_grid(u, v, nx, ny);
  Field wx, wy;
  spectral(w, wx, wy);
  to_physical(wx);
  to_physical(wy);
  double s = 0.0;
  for (std::size_t i = 0; i < nx.size(); ++i) s += nx[i].real() * wx[i].real() + ny[i].real() * wy[i].real();
  return s * kTwoPi * kTwoPi / (static_cast<double>(ng_) * ng_);
}

GalerkinVector Nse2d::apply(const GalerkinVector& u, const GalerkinVector& v) const {
  check_dims(u, "Nse2d::apply");
  check_dims(v, "Nse2d::apply");
  Field nx, ny;
  advection_on_grid(u, v, nx, ny);
  to_spectral(nx);
  to_spectral(ny);
  const double scale = kTwoPi * kTwoPi / (static_cast<double>(ng_) * ng_) * kModeNorm;
  GalerkinVector out(dim());
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    const auto& md = modes_[j];
    const double len = std::hypot(md.kx, md.ky);
    const double px = -md.ky / len;
    const double py = md.kx / len;
    const std::size_t s = slot(md.kx, md.ky);
    if (md.is_sine)
      out[j] = -scale * (px * nx[s].imag() + py * ny[s].imag());
    else
      out[j] = scale * (px * nx[s].real() + py * ny[s].real());
  }
  return out;
}

double Nse2d::q_norm(const GalerkinVector& v) const {
  std::vector<double> ux, uy;
  velocity_on_grid(v, ux, uy);
  double s = 0.0;
  for (std::size_t i = 0; i < ux.size(); ++i) {
    const double e = ux[i] * ux[i] + uy[i] * uy[i];
    s += e * e;
  }
  return std::pow(s * kTwoPi * kTwoPi / (static_cast<double>(ng_) * ng_), 0.25);
}

double nse_estimate_a0(const Nse2dParams& params, std::size_t samples, std::uint64_t seed) {
  // Placeholder a0; only q_norm and the basis are used here.
  const Nse2d model(params, 1.0);
  const SpectralBasis& basis = model.basis();
  const std::size_t n = model.dim();
  double best = 0.0;
  auto consider = [&](const GalerkinVector& v) {
    const double h = h_norm(v);
    if (h == 0.0) return;
    const double q = model.q_norm(v);
    best = std::max(best, q * q / (h * v_norm(v, basis)));
  };
  for (std::size_t j = 0; j < n; ++j) consider(GalerkinVector::unit(n, j));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    GalerkinVector v(n);
    if (s % 2 == 0) {
      // Few low modes: where the interpolation ratio concentrates.
      const auto support = 1 + static_cast<std::size_t>(uniform(rng) * std::min<double>(n, 16));
      for (std::size_t j = 0; j < std::min(support, n); ++j) v[j] = normal(rng);
    } else {
      const double decay = 3.0 * uniform(rng);
      for (std::size_t j = 0; j < n; ++j)
        v[j] = normal(rng) * std::pow(basis.wavenumber(j), -decay);
    }
    consider(v);
  }
  return 1.1 * best;
}

std::shared_ptr<Nse2d> make_nse2d(const Nse2dParams& params, std::size_t a0_samples, std::uint64_t seed) {
  return std::make_shared<Nse2d>(params, nse_estimate_a0(params, a0_samples, seed));
}

// ---------------------------------------------------------------------------

SpectralBasis linear_basis(const LinearModelParams& p) {
  if (p.modes < 1 || !(p.visc > 0.0)) throw std::invalid_argument("linear model: bad parameters");
  std::vector<double> eig(p.modes);
  for (std::size_t k = 0; k < p.modes; ++k) eig[k] = p.visc * static_cast<double>((k + 1) * (k + 1));
  return SpectralBasis(std::move(eig), p.visc);
}

LinearModel::LinearModel(const LinearModelParams& params)
    : ModelSpec("linear", linear_basis(params), 1.0 / std::sqrt(params.visc), 1.0) {}

double LinearModel::trilinear(const GalerkinVector& u, const GalerkinVector& v, const GalerkinVector& w) const {
  check_dims(u, "LinearModel::trilinear");
  check_dims(v, "LinearModel::trilinear");
  check_dims(w, "LinearModel::trilinear");
  return 0.0;
}

GalerkinVector LinearModel::apply(const GalerkinVector& u, const GalerkinVector& v) const {
  check_dims(u, "LinearModel::apply");
  check_dims(v, "LinearModel::apply");
  return GalerkinVector(dim());
}

double LinearModel::q_norm(const GalerkinVector& v) const {
  check_dims(v, "LinearModel::q_norm");
  return h_norm(v);
}

}  // namespace levyspde
