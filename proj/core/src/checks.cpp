#include "levyspde/checks.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "levyspde/parallel.hpp"

namespace levyspde {

namespace {

GalerkinVector sparse_vector(const SpectralBasis& basis, std::mt19937_64& rng, std::size_t width) {
  const std::size_t n = basis.dim();
  width = std::min(width, n);
  std::uniform_int_distribution<std::size_t> start(0, n - width);
  std::normal_distribution<double> normal;
  GalerkinVector v(n);
  const std::size_t s = start(rng);
  for (std::size_t j = s; j < s + width; ++j) v[j] = normal(rng);
  return v;
}

struct Triple {
  GalerkinVector u, v, w;
};

Triple draw_triple(const SpectralBasis& basis, std::uint64_t seed, std::size_t kind) {
  std::mt19937_64 rng(seed);
  switch (kind % 4) {
    case 0:
      return {random_vector(basis, rng), random_vector(basis, rng), random_vector(basis, rng)};
    case 1:
      return {random_vector(basis, rng, 1.5), random_vector(basis, rng, 1.5), random_vector(basis, rng, 1.5)};
    case 2: {
      // u, v, w on a common band of neighbouring modes
      GalerkinVector u = sparse_vector(basis, rng, 3);
      std::normal_distribution<double> normal;
      GalerkinVector v(basis.dim()), w(basis.dim());
      for (std::size_t j = 0; j < basis.dim(); ++j)
        if (u[j] != 0.0) {
          v[j] = normal(rng);
          w[j] = normal(rng);
        }
      if (basis.dim() > 1) {
        // let v, w reach one mode past the band
        for (std::size_t j = basis.dim() - 1; j > 0; --j)
          if (u[j - 1] != 0.0 && u[j] == 0.0) {
            v[j] = normal(rng);
            w[j] = normal(rng);
            break;
          }
      }
      return {u, v, w};
    }
    default:
      return {sparse_vector(basis, rng, 2), sparse_vector(basis, rng, 2), sparse_vector(basis, rng, 2)};
  }
}

MomentStat moment(const std::vector<double>& xs, double expected) {
  MomentStat s;
  s.expected = expected;
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return s;
}

}  // namespace

StructureReport structure_check(const ModelSpec& model, std::size_t samples, std::uint64_t seed) {
  struct Slot {
    double skew = 0, apply = 0, interp = 0, bound = 0;
  };
  std::vector<Slot> slots(samples);
  const SpectralBasis& basis = model.basis();
  const double cb = model.c_b();
  const double a0 = model.a0();
  parallel_for(samples, [&](std::size_t i) {
    const Triple t = draw_triple(basis, path_seed(seed, i), i);
    const double qu = model.q_norm(t.u), qv = model.q_norm(t.v), qw = model.q_norm(t.w);
    const double vv = v_norm(t.v, basis);
    Slot& s = slots[i];
    const double skew_scale = cb * qu * vv * qv;
    if (skew_scale > 0.0) s.skew = std::abs(model.trilinear(t.u, t.v, t.v)) / skew_scale;
    const double bound_scale = cb * qu * vv * qw;
    const double b = model.trilinear(t.u, t.v, t.w);
    if (bound_scale > 0.0) {
      s.bound = std::abs(b) / bound_scale;
      if (i % 8 == 0) s.apply = std::abs(b - dot(model.apply(t.u, t.v), t.w)) / bound_scale;
    }
    const double hv = h_norm(t.v);
    if (hv > 0.0) s.interp = qv * qv / (a0 * hv * vv);
  });
  StructureReport rep;
  rep.samples = samples;
  for (const Slot& s : slots) {
    rep.max_skew_ratio = std::max(rep.max_skew_ratio, s.skew);
    rep.max_apply_defect = std::max(rep.max_apply_defect, s.apply);
    rep.max_interp_ratio = std::max(rep.max_interp_ratio, s.interp);
    rep.max_bound_ratio = std::max(rep.max_bound_ratio, s.bound);
    if (s.skew > rep.skew_tolerance) ++rep.skew_violations;
    if (s.interp > 1.0 + 1e-12) ++rep.interp_violations;
    if (s.bound > 1.0 + 1e-12) ++rep.bound_violations;
  }
  return rep;
}

bool MomentStat::ok() const {
  const double gap = std::abs(mean - expected);
  if (se == 0.0) return gap <= 1e-12 * (1.0 + std::abs(expected));
  return gap <= 3.0 * se;
}

bool NoiseMomentReport::passed() const {
  if (!jump_count.ok() || !jump_isometry.ok() || !wiener_isometry.ok()) return false;
  for (const auto& s : compensated_mean)
    if (!s.ok()) return false;
  for (const auto& s : wiener_mean)
    if (!s.ok()) return false;
  return true;
}

NoiseMomentReport noise_moment_check(const CoefficientSpec& coeff, const GalerkinVector& v, const TimeGrid& grid,
                                     std::size_t paths, std::uint64_t seed) {
  if (paths < 2) throw std::invalid_argument("noise_moment_check: need at least 2 paths");
  const std::size_t n = coeff.basis().dim();
  require_same_dim(v.dim(), n, "noise_moment_check");
  const double T = grid.horizon() - grid.t0;
  const LevyMeasure& nu = coeff.measure();
  const WienerDriverSpec wiener{coeff.wiener_dims()};

  std::vector<double> counts(paths), jump_sq(paths), wiener_sq(paths);
  std::vector<std::vector<double>> jump_comp(n, std::vector<double>(paths)), wiener_comp(n, std::vector<double>(paths));
  const GalerkinVector comp = coeff.compensator_drift(grid.t0, v);
  parallel_for(paths, [&](std::size_t i) {
    const NoiseRealization noise = sample_realization(grid, nu, wiener, path_seed(seed, i));
    GalerkinVector J = -T * comp;
    for (const Jump& j : noise.jumps()) J += coeff.eval_G(j.time, v, j.mark);
    GalerkinVector W(n);
    if (wiener.dims > 0)
      for (std::size_t k = 0; k < grid.steps; ++k) W += coeff.eval_Psi_apply(grid.time(k), v, noise.wiener_increment(k));
    counts[i] = static_cast<double>(noise.jumps().size());
    jump_sq[i] = dot(J, J);
    wiener_sq[i] = dot(W, W);
    for (std::size_t c = 0; c < n; ++c) {
      jump_comp[c][i] = J[c];
      wiener_comp[c][i] = W[c];
    }
  });

  NoiseMomentReport rep;
  rep.paths = paths;
  rep.jump_count = moment(counts, nu.total_mass() * T);
  const double g_sq = nu.integrate([&](double z) {
    const GalerkinVector g = coeff.eval_G(grid.t0, v, z);
    return dot(g, g);
  });
  rep.jump_isometry = moment(jump_sq, T * g_sq);
  rep.wiener_isometry = moment(wiener_sq, T * coeff.psi_hs_norm_sq(grid.t0, v));
  for (std::size_t c = 0; c < n; ++c) {
    rep.compensated_mean.push_back(moment(jump_comp[c], 0.0));
    rep.wiener_mean.push_back(moment(wiener_comp[c], 0.0));
  }
  return rep;
}

double OrderStudy::min_order() const {
  double m = orders.empty() ? 0.0 : orders.front();
  for (double o : orders) m = std::min(m, o);
  return m;
}

bool OrderStudy::passed() const {
  bool all_zero = true;
  for (double m : metric) all_zero = all_zero && m == 0.0;
  if (all_zero) return true;
  return !orders.empty() && min_order() >= threshold;
}

namespace {

std::size_t refinement_factor(double coarse, double fine) {
  const double r = coarse / fine;
  const auto f = static_cast<std::size_t>(std::llround(r));
  if (f < 1 || std::abs(r - static_cast<double>(f)) > 1e-9 * r)
    throw std::invalid_argument("order study: step sizes must be integer multiples of the finest one");
  return f;
}

void fill_orders(OrderStudy& s) {
  for (std::size_t l = 0; l + 1 < s.metric.size(); ++l) {
    const double o = (s.metric[l] > 0.0 && s.metric[l + 1] > 0.0)
                         ? std::log(s.metric[l] / s.metric[l + 1]) / std::log(s.dts[l] / s.dts[l + 1])
                         : 0.0;
    s.orders.push_back(o);
  }
}

}  // namespace

OrderStudy ledger_order_study(const ModelSpec& model, const CoefficientSpec& coeff, const GalerkinVector& u0,
                              const SolverConfig& cfg, const std::vector<double>& dts, bool with_noise,
                              std::size_t paths, std::uint64_t seed, double threshold) {
  if (dts.size() < 2) throw std::invalid_argument("ledger_order_study: need at least two step sizes");
  OrderStudy study;
  study.dts = dts;
  study.threshold = threshold;
  double finest = dts.front();
  for (double d : dts) finest = std::min(finest, d);
  const TimeGrid fine_grid = TimeGrid::over(cfg.T, finest);
  const std::size_t M = with_noise ? std::max<std::size_t>(paths, 1) : 1;
  // Drift-only keeps the forcing and drops both noise coefficients, so no
  // compensator or Ito correction enters the identity.
  const auto f = coeff.forcing(cfg.grid().t0).coeffs();
  const CoefficientSpec drift(FamilySpec{}, FamilySpec{}, LevyMeasure::none(), coeff.basis(), 0,
                              std::vector<double>(f.begin(), f.end()));
  const CoefficientSpec& used = with_noise ? coeff : drift;

  std::vector<std::vector<double>> per(dts.size(), std::vector<double>(M));
  parallel_for(M, [&](std::size_t i) {
    const NoiseRealization fine = with_noise ? sample_realization(fine_grid, coeff.measure(),
                                                                  WienerDriverSpec{coeff.wiener_dims()},
                                                                  path_seed(seed, i))
                                             : NoiseRealization::zero(fine_grid, 0);
    for (std::size_t l = 0; l < dts.size(); ++l) {
      const NoiseRealization noise = fine.coarsen(refinement_factor(dts[l], finest));
      SolverConfig c = cfg;
      c.dt = dts[l];
      const System sys{model, used, noise};
      const EnergyLedger ledger = energy_ledger(baseline_direct(u0, sys, c, std::nullopt), sys);
      per[l][i] = with_noise ? std::abs(ledger.residual_total()) : ledger.residual_abs_sum();
    }
  });
  for (const auto& v : per) {
    double s = 0.0;
    for (double x : v) s += x;
    study.metric.push_back(s / static_cast<double>(M));
  }
  fill_orders(study);
  return study;
}

OrderStudy strong_order_study(const ModelSpec& model, const CoefficientSpec& coeff, const GalerkinVector& u0,
                              const SolverConfig& cfg, std::size_t levels, std::size_t paths, std::uint64_t seed,
                              double threshold) {
  if (levels < 2) throw std::invalid_argument("strong_order_study: need at least two refinement levels");
  if (paths < 1) throw std::invalid_argument("strong_order_study: need at least one path");
  OrderStudy study;
  study.threshold = threshold;
  const std::size_t finest_factor = std::size_t{1} << levels;
  const TimeGrid fine_grid = TimeGrid::over(cfg.T, cfg.dt / static_cast<double>(finest_factor));

  std::vector<std::vector<double>> err(levels, std::vector<double>(paths));
  parallel_for(paths, [&](std::size_t i) {
    const NoiseRealization fine =
        sample_realization(fine_grid, coeff.measure(), WienerDriverSpec{coeff.wiener_dims()}, path_seed(seed, i));
    std::vector<PathSegment> sols;
    for (std::size_t l = 0; l <= levels; ++l) {
      const NoiseRealization noise = fine.coarsen(finest_factor >> l);
      SolverConfig c = cfg;
      c.dt = cfg.dt / static_cast<double>(std::size_t{1} << l);
      const System sys{model, coeff, noise};
      SolveOutcome out = global_solve(u0, sys, c);
      if (out.blowup_flag) throw std::runtime_error("strong_order_study: " + out.blowup_reason);
      sols.push_back(std::move(out.trajectory));
    }
    for (std::size_t l = 0; l < levels; ++l) {
      double sup = 0.0;
      for (std::size_t k = 0; k < sols[l].size(); ++k)
        sup = std::max(sup, h_norm(sols[l].state(k) - sols[l + 1].state(2 * k)));
      err[l][i] = sup;
    }
  });
  for (std::size_t l = 0; l < levels; ++l) {
    study.dts.push_back(cfg.dt / static_cast<double>(std::size_t{1} << l));
    double s = 0.0;
    for (double x : err[l]) s += x;
    study.metric.push_back(s / static_cast<double>(paths));
  }
  fill_orders(study);
  return study;
}

std::vector<IterationReport> picard_ensemble(const ModelSpec& model, const CoefficientSpec& coeff,
                                             const GalerkinVector& u0, const SolverConfig& cfg, std::size_t paths,
                                             std::uint64_t seed) {
  SolverConfig c = cfg;
  c.T = cfg.T0;
  c.validate();
  const TimeGrid grid = c.grid();
  const Cutoff cutoff(c.m, c.delta0);
  std::vector<IterationReport> reports(paths);
  parallel_for(paths, [&](std::size_t i) {
    const NoiseRealization noise =
        sample_realization(grid, coeff.measure(), WienerDriverSpec{coeff.wiener_dims()}, path_seed(seed, i));
    const System sys{model, coeff, noise};
    reports[i] = picard_local(u0, 0, grid.steps, sys, c, cutoff).report;
  });
  return reports;
}

bool contraction_within(const ContractionReport& rep, double limit, std::size_t first, std::size_t last) {
  for (std::size_t n = first; n <= last; ++n) {
    if (n < rep.ratio_a.size() && rep.ratio_a[n] > limit) return false;
    if (n < rep.ratio_b.size() && rep.ratio_b[n] > limit) return false;
  }
  return true;
}

}  // namespace levyspde
