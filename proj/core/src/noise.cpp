#include "levyspde/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace levyspde {

namespace {

// int_a^b z^p dz for 0 < a < b.
double power_integral(double p, double a, double b) {
  if (std::abs(p + 1.0) < 1e-14) return std::log(b / a);
  return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

}  // namespace

LevyMeasure LevyMeasure::compound_gaussian(double rate, double mean, double sd) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("compound_gaussian: rate must be finite and >= 0");
  if (!(sd >= 0.0) || !std::isfinite(sd) || !std::isfinite(mean))
    throw std::invalid_argument("compound_gaussian: mean/sd must be finite, sd >= 0");
  if (rate > 0.0 && sd == 0.0 && mean == 0.0)
    throw std::invalid_argument("compound_gaussian: measure would charge z = 0");
  LevyMeasure m;
  m.family_ = LevyFamily::compound_gaussian;
  m.p_[0] = rate;
  m.p_[1] = mean;
  m.p_[2] = sd;
  m.total_mass_ = rate;
  m.m1_ = rate * mean;
  m.m2_ = rate * (mean * mean + sd * sd);
  return m;
}

LevyMeasure LevyMeasure::truncated_power(double c, double alpha, double eps_low, double r_high) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("truncated_power: c must be finite and >= 0");
  if (!std::isfinite(alpha)) throw std::invalid_argument("truncated_power: alpha must be finite");
  if (!(eps_low > 0.0) || !(eps_low < r_high) || !std::isfinite(r_high))
    throw std::invalid_argument("truncated_power: need 0 < eps_low < R");
  LevyMeasure m;
  m.family_ = LevyFamily::truncated_power;
  m.p_[0] = c;
  m.p_[1] = alpha;
  m.p_[2] = eps_low;
  m.p_[3] = r_high;
  m.total_mass_ = 2.0 * c * power_integral(-1.0 - alpha, eps_low, r_high);
  m.m1_ = 0.0;
  m.m2_ = 2.0 * c * power_integral(1.0 - alpha, eps_low, r_high);
  return m;
}

double LevyMeasure::sample_mark(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  if (family_ == LevyFamily::compound_gaussian) {
    std::normal_distribution<double> normal(mean(), sd() > 0.0 ? sd() : 1.0);
    return sd() > 0.0 ? normal(rng) : mean();
  }
  const double u = uniform(rng);
  const double a = alpha();
  double z;
  if (std::abs(a) < 1e-14) {
    z = eps_low() * std::pow(r_high() / eps_low(), u);
  } else {
    const double lo = std::pow(eps_low(), -a);
    const double hi = std::pow(r_high(), -a);
    z = std::pow(lo - u * (lo - hi), -1.0 / a);
  }
  return uniform(rng) < 0.5 ? -z : z;
}

double LevyMeasure::integrate(const std::function<double(double)>& f) const {
  if (total_mass_ == 0.0) return 0.0;
  if (family_ == LevyFamily::compound_gaussian) {
    if (sd() == 0.0) return rate() * f(mean());
    constexpr int kHalfWidth = 14;
    constexpr int kPerSd = 16;
    const double h = 1.0 / kPerSd;
    double s = 0.0;
    for (int i = -kHalfWidth * kPerSd; i <= kHalfWidth * kPerSd; ++i) {
      const double x = i * h;
      s += f(mean() + sd() * x) * std::exp(-0.5 * x * x);
    }
    return rate() * s * h / std::sqrt(2.0 * std::numbers::pi);
  }
  constexpr int kIntervals = 4096;
  const double a = std::log(eps_low());
  const double b = std::log(r_high());
  const double h = (b - a) / kIntervals;
  double s = 0.0;
  for (int i = 0; i <= kIntervals; ++i) {
    const double x = a + i * h;
    const double z = std::exp(x);
    const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s += w * (f(z) + f(-z)) * std::exp(-alpha() * x);
  }
  return power_c() * s * h / 3.0;
}

// ---------------------------------------------------------------------------

NoiseRealization::NoiseRealization(TimeGrid grid, std::size_t wiener_dims, std::vector<double> wiener_flat,
                                   std::vector<Jump> jumps, std::uint64_t seed)
    : grid_(grid), dims_(wiener_dims), wiener_(std::move(wiener_flat)), jumps_(std::move(jumps)), seed_(seed) {
  if (wiener_.size() != grid_.steps * dims_) throw DimensionError("NoiseRealization: wiener table size mismatch");
  step_offsets_.assign(grid_.steps + 1, 0);
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    const Jump& j = jumps_[i];
    if (i > 0 && !(j.time > jumps_[i - 1].time)) throw std::invalid_argument("NoiseRealization: jump times must increase");
    if (!(j.time > grid_.t0) || j.time > grid_.horizon() || j.step >= grid_.steps)
      throw std::invalid_argument("NoiseRealization: jump outside (t0, T]");
    ++step_offsets_[j.step + 1];
  }
  for (std::size_t k = 0; k < grid_.steps; ++k) step_offsets_[k + 1] += step_offsets_[k];
}

NoiseRealization NoiseRealization::zero(TimeGrid grid, std::size_t wiener_dims) {
  return NoiseRealization(grid, wiener_dims, std::vector<double>(grid.steps * wiener_dims, 0.0), {}, 0);
}

std::span<const double> NoiseRealization::wiener_increment(std::size_t step) const {
  return std::span<const double>(wiener_).subspan(step * dims_, dims_);
}

std::span<const Jump> NoiseRealization::jumps_in_step(std::size_t step) const {
  return std::span<const Jump>(jumps_).subspan(step_offsets_[step], step_offsets_[step + 1] - step_offsets_[step]);
}

NoiseRealization NoiseRealization::coarsen(std::size_t factor) const {
  if (factor == 0 || grid_.steps % factor != 0)
    throw std::invalid_argument("coarsen: factor must divide the step count");
  const TimeGrid coarse{grid_.t0, grid_.dt * static_cast<double>(factor), grid_.steps / factor};
  std::vector<double> w(coarse.steps * dims_, 0.0);
  for (std::size_t k = 0; k < grid_.steps; ++k)
    for (std::size_t d = 0; d < dims_; ++d) w[(k / factor) * dims_ + d] += wiener_[k * dims_ + d];
  std::vector<Jump> jumps = jumps_;
  for (Jump& j : jumps) j.step = j.step / factor;
  return NoiseRealization(coarse, dims_, std::move(w), std::move(jumps), seed_);
}

bool operator==(const NoiseRealization& a, const NoiseRealization& b) {
  return a.grid_.t0 == b.grid_.t0 && a.grid_.dt == b.grid_.dt && a.grid_.steps == b.grid_.steps &&
         a.dims_ == b.dims_ && a.wiener_ == b.wiener_ && a.jumps_ == b.jumps_ && a.seed_ == b.seed_;
}

std::size_t step_of(const TimeGrid& grid, double t) {
  const double x = std::ceil((t - grid.t0) / grid.dt) - 1.0;
  if (x <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(x), grid.steps - 1);
}

std::uint64_t path_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NoiseRealization sample_realization(const TimeGrid& grid, const LevyMeasure& measure,
                                    const WienerDriverSpec& wiener, std::uint64_t seed) {
  if (!std::isfinite(measure.total_mass())) throw std::invalid_argument("sample_realization: infinite Levy measure");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sq = std::sqrt(grid.dt);
  std::vector<double> w(grid.steps * wiener.dims);
  for (double& x : w) x = sq * normal(rng);

  std::vector<Jump> jumps;
  if (measure.total_mass() > 0.0) {
    std::exponential_distribution<double> wait(measure.total_mass());
    double t = grid.t0;
    for (;;) {
      t += wait(rng);
      if (t > grid.horizon()) break;
      if (t == grid.t0) continue;
      jumps.push_back(Jump{t, measure.sample_mark(rng), step_of(grid, t)});
    }
  }
  return NoiseRealization(grid, wiener.dims, std::move(w), std::move(jumps), seed);
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_realization_csv(std::ostream& os, const NoiseRealization& noise) {
  const TimeGrid& g = noise.grid();
  os << "#levyspde-noise,1\n";
  os << "grid," << fmt17(g.t0) << ',' << fmt17(g.dt) << ',' << g.steps << ',' << noise.wiener_dims() << ','
     << noise.seed() << '\n';
  for (std::size_t k = 0; k < g.steps; ++k) {
    if (noise.wiener_dims() == 0) break;
    os << "w," << k;
    for (double x : noise.wiener_increment(k)) os << ',' << fmt17(x);
    os << '\n';
  }
  for (const Jump& j : noise.jumps()) os << "j," << j.step << ',' << fmt17(j.time) << ',' << fmt17(j.mark) << '\n';
}

NoiseRealization read_realization_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "#levyspde-noise,1")
    throw std::invalid_argument("noise csv: missing or unsupported header");
  TimeGrid grid;
  std::size_t dims = 0;
  std::uint64_t seed = 0;
  bool have_grid = false;
  std::vector<double> w;
  std::vector<Jump> jumps;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    auto bad = [&] { return std::invalid_argument("noise csv: malformed line " + std::to_string(lineno)); };
    try {
      if (f[0] == "grid" && f.size() == 6) {
        grid = TimeGrid{std::stod(f[1]), std::stod(f[2]), std::stoull(f[3])};
        dims = std::stoull(f[4]);
        seed = std::stoull(f[5]);
        w.assign(grid.steps * dims, 0.0);
        have_grid = true;
      } else if (f[0] == "w" && have_grid && f.size() == dims + 2) {
        const std::size_t k = std::stoull(f[1]);
        if (k >= grid.steps) throw bad();
        for (std::size_t d = 0; d < dims; ++d) w[k * dims + d] = std::stod(f[2 + d]);
      } else if (f[0] == "j" && have_grid && f.size() == 4) {
        jumps.push_back(Jump{std::stod(f[2]), std::stod(f[3]), std::stoull(f[1])});
      } else {
        throw bad();
      }
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  if (!have_grid) throw std::invalid_argument("noise csv: missing grid line");
  return NoiseRealization(grid, dims, std::move(w), std::move(jumps), seed);
}

// ---------------------------------------------------------------------------

std::string to_string(CoefficientFamily f) {
  switch (f) {
    case CoefficientFamily::none: return "none";
    case CoefficientFamily::additive: return "additive";
    case CoefficientFamily::diagonal: return "diagonal";
    case CoefficientFamily::gradient: return "gradient";
  }
  return "none";
}

CoefficientFamily coefficient_family_from_string(const std::string& s) {
  if (s == "none") return CoefficientFamily::none;
  if (s == "additive") return CoefficientFamily::additive;
  if (s == "diagonal") return CoefficientFamily::diagonal;
  if (s == "gradient") return CoefficientFamily::gradient;
  throw std::invalid_argument("unknown coefficient family '" + s + "'");
}

namespace {

std::vector<double> expand_sigma(const FamilySpec& f, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (f.family == CoefficientFamily::none || f.family == CoefficientFamily::gradient) return out;
  if (f.sigma.empty()) throw std::invalid_argument("coefficient family needs sigma");
  if (f.sigma.size() == 1) {
    const std::size_t active = f.active_modes == 0 ? n : std::min(f.active_modes, n);
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(active), f.sigma[0]);
  } else {
    if (f.sigma.size() > n) throw DimensionError("coefficient sigma list longer than the mode count");
    std::copy(f.sigma.begin(), f.sigma.end(), out.begin());
  }
  for (double s : out)
    if (!std::isfinite(s)) throw std::invalid_argument("coefficient sigma must be finite");
  return out;
}

double max_sq(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x * x);
  return m;
}

double sum_sq(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x * x;
  return m;
}

// Adds the constants of one family; weight is m2 for the jump part and 1 for
// the Wiener part.
void add_family(NoiseConstants& c, const FamilySpec& f, const std::vector<double>& sig, double weight, double visc) {
  switch (f.family) {
    case CoefficientFamily::none: break;
    case CoefficientFamily::additive: c.l3 += weight * sum_sq(sig); break;
    case CoefficientFamily::diagonal:
      c.l1 += weight * max_sq(sig);
      c.l4 += weight * max_sq(sig);
      break;
    case CoefficientFamily::gradient:
      c.l2 += weight * f.theta * f.theta / visc;
      c.l5 += weight * f.theta * f.theta / visc;
      break;
  }
}

std::string fmt_const(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

NoiseConstants certify_constants(const FamilySpec& jump, const FamilySpec& wiener, const LevyMeasure& measure,
                                 const SpectralBasis& basis, std::size_t wiener_dims) {
  if (wiener_dims > basis.dim()) throw DimensionError("wiener_dims exceeds the number of modes");
  NoiseConstants c;
  add_family(c, jump, expand_sigma(jump, basis.dim()), measure.m2(), basis.viscosity());
  add_family(c, wiener, expand_sigma(wiener, wiener_dims), 1.0, basis.viscosity());
  if (!(c.l2 < 2.0))
    throw ConditionViolation("(H3) violated: L2 = " + fmt_const(c.l2) + " is not in [0,2) (requires L2, L5 in [0,2))");
  if (!(c.l5 < 2.0))
    throw ConditionViolation("(H3) violated: L5 = " + fmt_const(c.l5) + " is not in [0,2) (requires L2, L5 in [0,2))");
  return c;
}

CoefficientSpec::CoefficientSpec(FamilySpec jump, FamilySpec wiener, LevyMeasure measure, SpectralBasis basis,
                                 std::size_t wiener_dims, std::vector<double> forcing)
    : jump_(std::move(jump)),
      wiener_(std::move(wiener)),
      measure_(measure),
      basis_(std::move(basis)),
      wiener_dims_(wiener_dims),
      forcing_(basis_.dim()) {
  constants_ = certify_constants(jump_, wiener_, measure_, basis_, wiener_dims_);
  jump_sigma_ = expand_sigma(jump_, basis_.dim());
  wiener_sigma_ = expand_sigma(wiener_, wiener_dims_);
  if (forcing.size() > basis_.dim()) throw DimensionError("forcing longer than the mode count");
  for (std::size_t k = 0; k < forcing.size(); ++k) forcing_[k] = forcing[k];
  if (!forcing_.is_finite()) throw NonFiniteError("forcing must be finite");
}

double CoefficientSpec::factor(const FamilySpec& f, const std::vector<double>& sig, std::size_t j, double vj) const {
  switch (f.family) {
    case CoefficientFamily::none: return 0.0;
    case CoefficientFamily::additive: return sig[j];
    case CoefficientFamily::diagonal: return sig[j] * vj;
    case CoefficientFamily::gradient: return f.theta * basis_.wavenumber(j) * vj;
  }
  return 0.0;
}

GalerkinVector CoefficientSpec::jump_action(double /*t*/, const GalerkinVector& v) const {
  require_same_dim(v.dim(), basis_.dim(), "jump_action");
  GalerkinVector out(v.dim());
  for (std::size_t j = 0; j < v.dim(); ++j) out[j] = factor(jump_, jump_sigma_, j, v[j]);
  return out;
}

GalerkinVector CoefficientSpec::eval_G(double t, const GalerkinVector& v, double z) const {
  GalerkinVector out = jump_action(t, v);
  out *= z;
  return out;
}

GalerkinVector CoefficientSpec::eval_Psi_apply(double /*t*/, const GalerkinVector& v, std::span<const double> dw) const {
  require_same_dim(v.dim(), basis_.dim(), "eval_Psi_apply");
  require_same_dim(dw.size(), wiener_dims_, "eval_Psi_apply");
  GalerkinVector out(v.dim());
  for (std::size_t j = 0; j < wiener_dims_; ++j) out[j] = factor(wiener_, wiener_sigma_, j, v[j]) * dw[j];
  return out;
}

double CoefficientSpec::psi_hs_norm_sq(double /*t*/, const GalerkinVector& v) const {
  require_same_dim(v.dim(), basis_.dim(), "psi_hs_norm_sq");
  double s = 0.0;
  for (std::size_t j = 0; j < wiener_dims_; ++j) {
    const double f = factor(wiener_, wiener_sigma_, j, v[j]);
    s += f * f;
  }
  return s;
}

GalerkinVector CoefficientSpec::compensator_drift(double t, const GalerkinVector& v) const {
  GalerkinVector out = jump_action(t, v);
  out *= measure_.m1();
  return out;
}

const GalerkinVector& CoefficientSpec::forcing(double /*t*/) const { return forcing_; }

bool CoefficientSpec::has_noise() const {
  const bool jumps = jump_.family != CoefficientFamily::none && measure_.total_mass() > 0.0;
  const bool wiener = wiener_.family != CoefficientFamily::none && wiener_dims_ > 0;
  return jumps || wiener;
}

GalerkinVector random_vector(const SpectralBasis& basis, std::mt19937_64& rng, double decay) {
  std::normal_distribution<double> normal(0.0, 1.0);
  GalerkinVector v(basis.dim());
  for (std::size_t j = 0; j < basis.dim(); ++j)
    v[j] = normal(rng) * (decay == 0.0 ? 1.0 : std::pow(basis.wavenumber(j) / basis.wavenumber(0), -decay));
  return v;
}

ConditionReport empirical_condition_check(const CoefficientSpec& coeff, std::size_t samples, std::uint64_t seed) {
  const SpectralBasis& basis = coeff.basis();
  const NoiseConstants& L = coeff.constants();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::size_t n = basis.dim();
  ConditionReport report;
  report.samples = samples;
  auto ratio = [](double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  for (std::size_t s = 0; s < samples; ++s) {
    GalerkinVector v1(n), v2(n);
    if (s % 4 == 3) {
      // single-mode directions
      v1 = GalerkinVector::unit(n, s % n);
      v1 *= 1.0 + uniform(rng);
      v2 = GalerkinVector(n);
    } else {
      const double decay = 2.0 * uniform(rng);
      v1 = random_vector(basis, rng, decay);
      v2 = random_vector(basis, rng, decay);
    }
    const GalerkinVector d = v1 - v2;

    double psi_diff = 0.0;
    {
      std::vector<double> ones(coeff.wiener_dims(), 1.0);
      // Psi is diagonal: its HS norm is the norm of Psi(v)(1,...,1).
      const GalerkinVector p = coeff.eval_Psi_apply(0.0, v1, ones) - coeff.eval_Psi_apply(0.0, v2, ones);
      psi_diff = dot(p, p);
    }
    const double jump_diff = coeff.measure().integrate([&](double z) {
      const GalerkinVector g = coeff.eval_G(0.0, v1, z) - coeff.eval_G(0.0, v2, z);
      return dot(g, g);
    });
    const double lhs1 = psi_diff + jump_diff;
    const double rhs1 = L.l1 * dot(d, d) + L.l2 * v_norm_sq(d, basis);
    report.max_ratio_lipschitz = std::max(report.max_ratio_lipschitz, ratio(lhs1, rhs1));

    const double jump_growth = coeff.measure().integrate([&](double z) {
      const GalerkinVector g = coeff.eval_G(0.0, v1, z);
      return dot(g, g);
    });
    const double lhs2 = coeff.psi_hs_norm_sq(0.0, v1) + jump_growth;
    const double rhs2 = L.l3 + L.l4 * dot(v1, v1) + L.l5 * v_norm_sq(v1, basis);
    report.max_ratio_growth = std::max(report.max_ratio_growth, ratio(lhs2, rhs2));
  }
  return report;
}

}  // namespace levyspde
