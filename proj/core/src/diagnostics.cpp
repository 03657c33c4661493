#include "levyspde/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace levyspde {

double EnergyLedger::residual_abs_sum() const {
  double s = 0.0;
  for (const auto& st : steps) s += std::abs(st.residual);
  return s;
}

double EnergyLedger::residual_total() const {
  double s = 0.0;
  for (const auto& st : steps) s += st.residual;
  return s;
}

EnergyLedger energy_ledger(const PathSegment& path, const System& sys) {
  const TimeGrid& grid = sys.noise.grid();
  if (std::abs(path.dt() - grid.dt) > 1e-12 * grid.dt) throw std::invalid_argument("energy_ledger: grid mismatch");
  const std::size_t k0 = grid.index_of(path.t_start());
  if (k0 + path.steps() > grid.steps) throw std::invalid_argument("energy_ledger: path extends past the noise grid");
  const CoefficientSpec& coeff = sys.coeff;
  const SpectralBasis& basis = sys.model.basis();
  const double dt = grid.dt;
  const double m1 = coeff.measure().m1();

  EnergyLedger ledger;
  ledger.steps.reserve(path.steps());
  for (std::size_t i = 0; i < path.steps(); ++i) {
    const std::size_t k = k0 + i;
    const double t = grid.time(k);
    const GalerkinVector& y = path.state(i);
    const GalerkinVector& y1 = path.state(i + 1);
    LedgerStep st;
    st.increment = dot(y1, y1) - dot(y, y);
    st.dissipation = 2.0 * dt * v_norm_sq(y, basis);
    st.forcing = 2.0 * dt * dot(coeff.forcing(t), y);
    if (coeff.wiener_dims() > 0) {
      st.wiener_mart = 2.0 * dot(coeff.eval_Psi_apply(t, y, sys.noise.wiener_increment(k)), y);
      st.wiener_quad = dt * coeff.psi_hs_norm_sq(t, y);
    }
    const auto jumps = sys.noise.jumps_in_step(k);
    if (!jumps.empty() || m1 != 0.0) {
      const GalerkinVector action = coeff.jump_action(t, y);
      const double pair = dot(action, y);
      const double act_sq = dot(action, action);
      double zsum = 0.0, zsq = 0.0;
      for (const Jump& j : jumps) {
        zsum += j.mark;
        zsq += j.mark * j.mark;
      }
      st.jump_mart = 2.0 * (zsum - dt * m1) * pair;
      st.jump_quad = zsq * act_sq;
    }
    st.residual = st.increment - (-st.dissipation + st.forcing + st.wiener_mart + st.jump_mart + st.jump_quad +
                                  st.wiener_quad);
    ledger.steps.push_back(st);
  }
  return ledger;
}

// ---------------------------------------------------------------------------

double gronwall_bound(double mean_u0_sq, double forcing_integral, const NoiseConstants& c, double T) {
  return (mean_u0_sq + 2.0 / (2.0 - c.l5) * forcing_integral + c.l3 * T) * std::exp(c.l4 * T);
}

AprioriReport apriori_check(std::span<const PathSegment> paths, const CoefficientSpec& coeff) {
  if (paths.size() < 30) throw std::invalid_argument("apriori_check: need at least 30 paths");
  const std::size_t n_pts = paths.front().size();
  for (const auto& p : paths)
    if (p.size() != n_pts) throw std::invalid_argument("apriori_check: paths must share one grid");
  const double M = static_cast<double>(paths.size());
  const PathSegment& first = paths.front();
  const double T = first.t_end() - first.t_start();

  AprioriReport r;
  r.paths = paths.size();
  for (std::size_t k = 0; k < n_pts; ++k) {
    double s = 0.0, s2 = 0.0;
    for (const auto& p : paths) {
      const double e = dot(p.state(k), p.state(k));
      s += e;
      s2 += e * e;
    }
    const double mean = s / M;
    if (k == 0) r.mean_initial_energy = mean;
    if (k == 0 || mean > r.sup_mean_energy) {
      r.sup_mean_energy = mean;
      r.sup_mean_energy_se = std::sqrt(std::max(0.0, s2 / M - mean * mean) / (M - 1.0));
      r.sup_time = first.time(k);
    }
  }
  double s = 0.0, s2 = 0.0;
  for (const auto& p : paths) {
    const double d = p.xi_sq(p.steps());
    s += d;
    s2 += d * d;
  }
  r.mean_dissipation = s / M;
  r.mean_dissipation_se = std::sqrt(std::max(0.0, s2 / M - r.mean_dissipation * r.mean_dissipation) / (M - 1.0));

  const double fd = dual_norm(coeff.forcing(0.0), coeff.basis());
  r.forcing_integral = T * fd * fd;
  const NoiseConstants& c = coeff.constants();
  r.bound = gronwall_bound(r.mean_initial_energy, r.forcing_integral, c, T);
  r.bound_dissipation = 2.0 / (2.0 - c.l5) * r.bound;
  r.energy_ok = r.sup_mean_energy <= r.bound + 3.0 * r.sup_mean_energy_se;
  r.dissipation_ok = r.mean_dissipation <= r.bound_dissipation + 3.0 * r.mean_dissipation_se;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

void require_same_grid(const PathSegment& a, const PathSegment& b, const char* what) {
  if (a.size() != b.size() || std::abs(a.t_start() - b.t_start()) > 1e-12 || std::abs(a.dt() - b.dt()) > 1e-15)
    throw std::invalid_argument(std::string(what) + ": paths are not on the same grid");
}

double indicator_3delta(const PathSegment& p, std::size_t k, double delta) {
  return std::sqrt(p.xi_sq(k)) <= 3.0 * delta ? 1.0 : 0.0;
}

double xi_n_at(const PathSegment& prev, const PathSegment& cur, std::size_t k, double delta) {
  const SpectralBasis& basis = cur.basis();
  return v_norm_sq(prev.state(k), basis) * indicator_3delta(prev, k, delta) +
         v_norm_sq(cur.state(k), basis) * indicator_3delta(cur, k, delta);
}

double cutoff_weight(const PathSegment& p, std::size_t k, const Cutoff& c) {
  return c.phi(h_norm(p.state(k))) * c.g(std::sqrt(p.xi_sq(k)));
}

struct EnvelopeParts {
  std::vector<double> values;
  std::vector<double> base;
  std::vector<double> scaled;  // multiplies the constant
};

EnvelopeParts envelope_parts(const PathSegment& prev, const PathSegment& cur, const PathSegment& next,
                             const ModelSpec& model, const Cutoff& cutoff, double eps, double p) {
  require_same_grid(prev, cur, "in_diagnostic");
  require_same_grid(cur, next, "in_diagnostic");
  const SpectralBasis& basis = model.basis();
  const double delta = cutoff.delta();
  const double m = cutoff.m();
  const double dt = cur.dt();
  const double s_weight = std::pow(eps, -3.0) *
                          (1.0 + (m + 2) * (m + 2) + (m + 2) * (m + 2) / delta +
                           (m + 1) * (m + 1) * std::pow(delta, -4.0 * p) +
                           (m + 1) * (m + 1) * eps * eps * eps * std::pow(delta, -4.0 * p));
  const double xi_coef = eps / std::pow(delta, 1.5) + std::pow(eps, -0.5) * std::pow(delta, 2.0 * p - 2.0) +
                         eps * std::pow(delta, 2.0 * (p - 1.0));

  EnvelopeParts out;
  double d0_xi_sq = 0.0;
  for (std::size_t k = 0; k < cur.size(); ++k) {
    const GalerkinVector& a = prev.state(k);
    const GalerkinVector& b = cur.state(k);
    const GalerkinVector& c = next.state(k);
    const GalerkinVector d1 = c - b;
    const GalerkinVector d0 = b - a;
    GalerkinVector term = model.apply(b, c);
    term *= cutoff_weight(cur, k, cutoff);
    term.axpy(-cutoff_weight(prev, k, cutoff), model.apply(a, b));
    out.values.push_back(dot(term, d1));

    const double xi = xi_n_at(prev, cur, k, delta);
    const double d1v = v_norm_sq(d1, basis);
    const double d0v = v_norm_sq(d0, basis);
    out.base.push_back(7.0 * eps * d1v + (2.0 * eps + std::pow(eps, -0.5) * std::pow(delta, 2.0 * p)) * d0v +
                       3.0 * eps * dot(d0, d0) * xi);
    out.scaled.push_back(xi_coef * d0_xi_sq * xi + s_weight * xi * dot(d1, d1));
    d0_xi_sq += dt * d0v;
  }
  return out;
}

}  // namespace

XiCapReport xi_cap_check(const PathSegment& prev, const PathSegment& cur, double delta) {
  require_same_grid(prev, cur, "xi_cap_check");
  XiCapReport r;
  double max_v = 0.0;
  for (std::size_t k = 0; k < cur.size(); ++k) {
    r.series.push_back(xi_n_at(prev, cur, k, delta));
    max_v = std::max({max_v, v_norm_sq(prev.state(k), cur.basis()), v_norm_sq(cur.state(k), cur.basis())});
  }
  for (std::size_t k = 0; k + 1 < cur.size(); ++k) r.integral += cur.dt() * r.series[k];
  r.overshoot = cur.dt() * max_v;
  r.cap = 18.0 * delta * delta + 2.0 * r.overshoot;
  r.passed = r.integral <= r.cap;
  return r;
}

InReport in_diagnostic(const PathSegment& prev, const PathSegment& cur, const PathSegment& next,
                       const ModelSpec& model, const Cutoff& cutoff, const EnvelopeParams& env) {
  EnvelopeParts parts = envelope_parts(prev, cur, next, model, cutoff, env.eps, env.p);
  InReport r;
  r.values = std::move(parts.values);
  std::size_t violations = 0;
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    const double e = parts.base[k] + env.constant * parts.scaled[k];
    r.envelope.push_back(e);
    if (r.values[k] > e) ++violations;
    if (k + 1 < r.values.size()) r.integral += cur.dt() * r.values[k];
  }
  r.violation_fraction = static_cast<double>(violations) / static_cast<double>(r.values.size());
  return r;
}

double calibrate_envelope_constant(const PathSegment& prev, const PathSegment& cur, const PathSegment& next,
                                   const ModelSpec& model, const Cutoff& cutoff, double eps, double p) {
  const EnvelopeParts parts = envelope_parts(prev, cur, next, model, cutoff, eps, p);
  double c = 0.0;
  for (std::size_t k = 0; k < parts.values.size(); ++k) {
    const double excess = parts.values[k] - parts.base[k];
    if (excess <= 0.0) continue;
    if (parts.scaled[k] <= 0.0) return std::numeric_limits<double>::infinity();
    c = std::max(c, excess / parts.scaled[k]);
  }
  return c;
}

// ---------------------------------------------------------------------------

ContractionReport contraction_report(std::span<const IterationReport> reports) {
  if (reports.size() < 30) throw std::invalid_argument("contraction_report: need at least 30 paths");
  std::size_t depth = 0;
  for (const auto& r : reports) depth = std::max(depth, r.records.size());
  if (depth < 2) throw std::invalid_argument("contraction_report: need at least 2 outer iterations");

  ContractionReport out;
  out.paths = reports.size();
  out.a.assign(depth, 0.0);
  out.b.assign(depth, 0.0);
  for (const auto& r : reports)
    for (std::size_t n = 0; n < r.records.size(); ++n) {
      out.a[n] += r.records[n].xi_increment * r.records[n].xi_increment;
      out.b[n] += r.records[n].sup_increment;
    }
  const double M = static_cast<double>(reports.size());
  for (std::size_t n = 0; n < depth; ++n) {
    out.a[n] = std::sqrt(out.a[n] / M);
    out.b[n] /= M;
  }
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  for (std::size_t n = 0; n + 1 < depth; ++n) {
    out.ratio_a.push_back(ratio(out.a[n + 1], out.a[n]));
    out.ratio_b.push_back(ratio(out.b[n + 1], out.b[n]));
  }
  double pa = 0.0, pb = 0.0;
  for (std::size_t n = 0; n < depth; ++n) {
    if (n >= 2) {
      pa += out.a[n];
      pb += out.b[n];
    }
    out.partial_a.push_back(pa);
    out.partial_b.push_back(pb);
  }
  return out;
}

}  // namespace levyspde
