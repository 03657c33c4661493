#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "levyspde/spaces.hpp"

namespace levyspde {

/// Contract for the triple (A, B, Q): a diagonal operator, a skew-symmetric
/// bilinear convection term, and an interpolation norm with certified
/// constants a0 (|v|_Q^2 <= a0 |v| ||v||) and C_b (|b(u,v,w)| <= C_b |u|_Q ||v|| |w|_Q).
class ModelSpec {
 public:
  virtual ~ModelSpec() = default;

  ModelSpec(const ModelSpec&) = delete;
  ModelSpec& operator=(const ModelSpec&) = delete;

  const std::string& name() const { return name_; }
  const SpectralBasis& basis() const { return basis_; }
  std::size_t dim() const { return basis_.dim(); }
  double a0() const { return a0_; }
  double c_b() const { return c_b_; }

  /// b(u, v, w) = <B(u, v), w>.
  virtual double trilinear(const GalerkinVector& u, const GalerkinVector& v,
                           const GalerkinVector& w) const = 0;
  /// B(u, v) in basis coordinates.
  virtual GalerkinVector apply(const GalerkinVector& u, const GalerkinVector& v) const = 0;
  virtual double q_norm(const GalerkinVector& v) const = 0;

 protected:
  ModelSpec(std::string name, SpectralBasis basis, double a0, double c_b);
  void check_dims(const GalerkinVector& v, const char* what) const;

 private:
  std::string name_;
  SpectralBasis basis_;
  double a0_;
  double c_b_;
};

using ModelPtr = std::shared_ptr<const ModelSpec>;

struct ModelConstants {
  double a0 = 0.0;
  double c_b = 0.0;
};

// ---------------------------------------------------------------------------
// Real dyadic shell model

struct DyadicShellParams {
  std::size_t modes = 24;
  double k0 = 2.0;
  double visc = 1.0;

  void validate() const;
  double wavenumber(std::size_t n) const;  // zero-based: k0 * 2^n
};

/// b(u,v,w) = sum_n k_n u_n (v_n w_{n+1} - v_{n+1} w_n), indices outside the
/// shell range contribute zero.
double dyadic_trilinear(const GalerkinVector& u, const GalerkinVector& v,
                        const GalerkinVector& w, const DyadicShellParams& params);

SpectralBasis dyadic_basis(const DyadicShellParams& params);

/// a0 = 1/(sqrt(nu) k_1) with Q = H, C_b = 2/sqrt(nu) (twice the sharp
/// value 1/sqrt(nu), attained at u = e_n, v ~ e_n, w = e_{n+1}).
ModelConstants dyadic_certify(const DyadicShellParams& params);

class DyadicShell final : public ModelSpec {
 public:
  explicit DyadicShell(const DyadicShellParams& params);
  /// Overrides the certified constants; used to check that violation searches catch bad values.
  DyadicShell(const DyadicShellParams& params, ModelConstants declared);

  const DyadicShellParams& params() const { return params_; }

  double trilinear(const GalerkinVector& u, const GalerkinVector& v,
                   const GalerkinVector& w) const override;
  GalerkinVector apply(const GalerkinVector& u, const GalerkinVector& v) const override;
  double q_norm(const GalerkinVector& v) const override;

 private:
  DyadicShellParams params_;
  std::vector<double> k_;
};

// ---------------------------------------------------------------------------
// 2D Navier-Stokes on the periodic box [0, 2 pi]^2

struct Nse2dParams {
  int modes_per_axis = 8;
  double visc = 1.0;
  bool dealias = true;

  void validate() const;
};

/// One real divergence-free basis function c * {cos, sin}(k.x) k^perp/|k|.
struct FourierMode {
  int kx = 0;
  int ky = 0;
  bool is_sine = false;
};

/// Retained modes in basis order (nondecreasing |k|^2).
std::vector<FourierMode> nse_mode_table(int modes_per_axis);

/// Collocation points per axis: >= 3M+1 when dealiasing, 2M+1 otherwise.
int nse_grid_size(const Nse2dParams& params);

SpectralBasis nse_basis(const Nse2dParams& params);

class Nse2d final : public ModelSpec {
 public:
  /// a0 is supplied by the caller (see nse_estimate_a0); C_b = 1/sqrt(nu).
  Nse2d(const Nse2dParams& params, double a0);
  ~Nse2d() override;

  const Nse2dParams& params() const { return params_; }
  const std::vector<FourierMode>& modes() const { return modes_; }
  int grid_size() const { return ng_; }

  double trilinear(const GalerkinVector& u, const GalerkinVector& v,
                   const GalerkinVector& w) const override;
  GalerkinVector apply(const GalerkinVector& u, const GalerkinVector& v) const override;
  double q_norm(const GalerkinVector& v) const override;

  /// Velocity components on the collocation grid (row-major, ix * Ng + iy).
  void velocity_on_grid(const GalerkinVector& v, std::vector<double>& ux, std::vector<double>& uy) const;

 private:
  using Field = std::vector<std::complex<double>>;
  void spectral(const GalerkinVector& v, Field& fx, Field& fy) const;
  void to_physical(Field& f) const;
  void to_spectral(Field& f) const;
  void gradient_on_grid(const GalerkinVector& v, Field (&g)[2][2]) const;
  void advection_on_grid(const GalerkinVector& u, const GalerkinVector& v, Field& nx, Field& ny) const;
  int signed_index(int i) const { return i <= ng_ / 2 ? i : i - ng_; }
  std::size_t slot(int kx, int ky) const;

  Nse2dParams params_;
  std::vector<FourierMode> modes_;
  int ng_;
  void* plan_backward_ = nullptr;
  void* plan_forward_ = nullptr;
};

/// Empirical Ladyzhenskaya constant: max of |v|_Q^2 / (|v| ||v||) over
/// sampled v (single modes plus random few- and many-mode combinations),
/// inflated by 10%.
double nse_estimate_a0(const Nse2dParams& params, std::size_t samples, std::uint64_t seed);

/// Builds an Nse2d with a0 from nse_estimate_a0.
std::shared_ptr<Nse2d> make_nse2d(const Nse2dParams& params, std::size_t a0_samples = 2000,
                                  std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Linear reference model: B == 0, lambda_k = nu k^2.

struct LinearModelParams {
  std::size_t modes = 8;
  double visc = 1.0;
};

SpectralBasis linear_basis(const LinearModelParams& params);

class LinearModel final : public ModelSpec {
 public:
  explicit LinearModel(const LinearModelParams& params);

  double trilinear(const GalerkinVector& u, const GalerkinVector& v,
                   const GalerkinVector& w) const override;
  GalerkinVector apply(const GalerkinVector& u, const GalerkinVector& v) const override;
  double q_norm(const GalerkinVector& v) const override;
};

}  // namespace levyspde
