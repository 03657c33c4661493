#include "levyspde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levyspde {

std::string to_string(Stepper s) { return s == Stepper::resolvent ? "resolvent" : "exponential"; }
std::string to_string(InnerMode m) { return m == InnerMode::direct ? "direct" : "h_iteration"; }

Stepper stepper_from_string(const std::string& s) {
  if (s == "resolvent") return Stepper::resolvent;
  if (s == "exponential") return Stepper::exponential;
  throw std::invalid_argument("unknown stepper '" + s + "'");
}

InnerMode inner_mode_from_string(const std::string& s) {
  if (s == "direct") return InnerMode::direct;
  if (s == "h_iteration") return InnerMode::h_iteration;
  throw std::invalid_argument("unknown inner_mode '" + s + "'");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("solver: T must be positive");
  if (!(T0 > 0.0) || T0 > T * (1.0 + 1e-12)) throw std::invalid_argument("solver: need 0 < T0 <= T");
  if (!(delta0 > 0.0)) throw std::invalid_argument("solver: delta0 must be positive");
  if (!(tol_picard > 0.0)) throw std::invalid_argument("solver: tol_picard must be positive");
  if (max_picard < 1) throw std::invalid_argument("solver: max_picard must be >= 1");
  if (!(m > 0.0)) throw std::invalid_argument("solver: m must be positive");
  if (!(m_growth > 1.0)) throw std::invalid_argument("solver: m_growth must exceed 1");
  if (max_inner < 1) throw std::invalid_argument("solver: max_inner must be >= 1");
  if (!(xi_ceiling > 0.0)) throw std::invalid_argument("solver: xi_ceiling must be positive");
  (void)grid();
}

namespace {

void check_grid(const SolverConfig& cfg, const System& sys) {
  const TimeGrid& g = sys.noise.grid();
  if (std::abs(g.dt - cfg.dt) > 1e-12 * cfg.dt || g.steps != cfg.grid().steps)
    throw std::invalid_argument("solver: noise realization grid does not match the solver config");
  require_same_dim(sys.model.dim(), sys.coeff.basis().dim(), "solver (model vs coefficients)");
  if (sys.noise.wiener_dims() != sys.coeff.wiener_dims())
    throw DimensionError("solver: noise and coefficients disagree on wiener dims");
}

std::size_t start_step(const PathSegment& p, const System& sys) { return sys.noise.grid().index_of(p.t_start()); }

}  // namespace

GalerkinVector scheme_step(const GalerkinVector& y, const GalerkinVector& noise_arg, const GalerkinVector& advecting,
                           double c, std::size_t k, const System& sys, Stepper stepper) {
  const TimeGrid& grid = sys.noise.grid();
  const double dt = grid.dt;
  const double t = grid.time(k);
  const CoefficientSpec& coeff = sys.coeff;

  GalerkinVector x = y;
  if (c != 0.0) x.axpy(-dt * c, sys.model.apply(advecting, y));
  x.axpy(dt, coeff.forcing(t));
  if (coeff.wiener_dims() > 0 && coeff.wiener_family().family != CoefficientFamily::none)
    x += coeff.eval_Psi_apply(t, noise_arg, sys.noise.wiener_increment(k));
  const auto jumps = sys.noise.jumps_in_step(k);
  const double m1 = coeff.measure().m1();
  if (coeff.jump_family().family != CoefficientFamily::none && (!jumps.empty() || m1 != 0.0)) {
    const GalerkinVector action = coeff.jump_action(t, noise_arg);
    for (const Jump& j : jumps) x.axpy(j.mark, action);
    if (m1 != 0.0) x.axpy(-dt * m1, action);
  }
  GalerkinVector out = stepper == Stepper::resolvent ? resolvent_step(x, sys.model.basis(), dt)
                                                     : semigroup_step(x, sys.model.basis(), dt);
  if (!out.is_finite()) {
    std::ostringstream os;
    os << "non-finite state at step " << k << " (t = " << grid.time(k + 1) << ")";
    throw NonFiniteError(os.str());
  }
  return out;
}

GalerkinVector linear_step(const GalerkinVector& y, const GalerkinVector& advecting, double advecting_xi,
                           std::size_t k, const System& sys, const Cutoff& cutoff, Stepper stepper) {
  const double c = cutoff.phi(h_norm(advecting)) * cutoff.g(advecting_xi);
  return scheme_step(y, y, advecting, c, k, sys, stepper);
}

PathSegment solve_linearized(const PathSegment& advecting, const GalerkinVector& u0, const System& sys,
                             const SolverConfig& cfg, const Cutoff& cutoff) {
  const std::size_t k0 = start_step(advecting, sys);
  PathSegment out(advecting.t_start(), advecting.dt(), sys.model.basis(), u0);
  for (std::size_t i = 0; i < advecting.steps(); ++i)
    out.append(linear_step(out.back(), advecting.state(i), std::sqrt(advecting.xi_sq(i)), k0 + i, sys, cutoff,
                           cfg.stepper));
  return out;
}

InnerResult inner_h_iteration(const PathSegment& advecting, const GalerkinVector& u0, const System& sys,
                              const SolverConfig& cfg, const Cutoff& cutoff) {
  const std::size_t k0 = start_step(advecting, sys);
  const SpectralBasis& basis = sys.model.basis();
  PathSegment h(advecting.t_start(), advecting.dt(), basis, u0);
  for (std::size_t i = 1; i <= advecting.steps(); ++i)
    h.append(semigroup_step(u0, basis, static_cast<double>(i) * advecting.dt()));

  std::vector<double> weights(advecting.steps());
  for (std::size_t i = 0; i < advecting.steps(); ++i)
    weights[i] = cutoff.phi(h_norm(advecting.state(i))) * cutoff.g(std::sqrt(advecting.xi_sq(i)));

  InnerResult res{h, 0, {}};
  for (std::size_t pass = 1; pass <= cfg.max_inner; ++pass) {
    PathSegment next(advecting.t_start(), advecting.dt(), basis, u0);
    for (std::size_t i = 0; i < advecting.steps(); ++i)
      next.append(scheme_step(next.back(), res.path.state(i), advecting.state(i), weights[i], k0 + i, sys,
                              cfg.stepper));
    const double inc = sup_distance(next, res.path);
    res.increments.push_back(inc);
    res.path = std::move(next);
    res.passes = pass;
    if (inc <= cfg.tol_inner) return res;
  }
  throw InnerIterationDivergence("inner h-iteration did not converge within max_inner passes");
}

PicardResult picard_local(const GalerkinVector& u0, std::size_t step_begin, std::size_t step_end, const System& sys,
                          const SolverConfig& cfg, const Cutoff& cutoff) {
  check_grid(cfg, sys);
  if (step_begin >= step_end || step_end > sys.noise.grid().steps)
    throw std::invalid_argument("picard_local: window outside the grid");
  const TimeGrid& grid = sys.noise.grid();
  const SpectralBasis& basis = sys.model.basis();

  PathSegment current = zero_path(grid.time(step_begin), grid.dt, step_end - step_begin, basis);
  std::optional<PathSegment> previous;
  PicardResult res{current, {}};
  res.report.window_start = grid.time(step_begin);
  res.report.window_end = grid.time(step_end);

  for (std::size_t n = 0; n < cfg.max_picard; ++n) {
    PathSegment next = cfg.inner_mode == InnerMode::direct
                           ? solve_linearized(current, u0, sys, cfg, cutoff)
                           : inner_h_iteration(current, u0, sys, cfg, cutoff).path;
    IterationRecord rec;
    rec.n = n;
    double xi_sq = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      const GalerkinVector d = next.state(k) - current.state(k);
      rec.sup_increment = std::max(rec.sup_increment, h_norm(d));
      if (k + 1 < next.size()) xi_sq += grid.dt * v_norm_sq(d, basis);
    }
    rec.xi_increment = std::sqrt(xi_sq);
    if (cfg.record_diagnostics && previous) {
      rec.xi_integral = xi_cap_check(*previous, current, cutoff.delta()).integral;
      rec.in_integral = in_diagnostic(*previous, current, next, sys.model, cutoff, EnvelopeParams{}).integral;
    }
    res.report.records.push_back(rec);
    res.report.iterations_used = n + 1;
    previous = std::move(current);
    current = std::move(next);
    if (rec.sup_increment + rec.xi_increment <= cfg.tol_picard) {
      res.report.converged = true;
      break;
    }
  }
  res.path = std::move(current);
  return res;
}

SolveOutcome concatenate_m_solution(const GalerkinVector& u0, const System& sys, const SolverConfig& cfg, double m) {
  cfg.validate();
  check_grid(cfg, sys);
  const TimeGrid& grid = sys.noise.grid();
  const Cutoff cutoff(m, cfg.delta0);
  const std::size_t window =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.T0 / grid.dt)));
  const double budget = cfg.delta0 * cfg.delta0;

  SolveOutcome out{PathSegment(grid.t0, grid.dt, sys.model.basis(), u0), {}, m, 0, false, {}, sys.noise.seed(), {}};
  std::size_t k = 0;
  GalerkinVector state = u0;
  while (k < grid.steps) {
    std::size_t len = window;
    std::optional<PicardResult> local;
    for (std::size_t halving = 0;; ++halving) {
      const std::size_t end = std::min(grid.steps, k + len);
      try {
        local = picard_local(state, k, end, sys, cfg, cutoff);
      } catch (const NonFiniteError& e) {
        out.blowup_flag = true;
        out.blowup_reason = e.what();
        return out;
      }
      if (local->report.converged) break;
      if (halving == cfg.max_T0_halvings || len == 1) {
        std::ostringstream os;
        os << "outer iteration did not converge on window starting at t = " << grid.time(k) << " after " << halving
           << " T0 halvings";
        throw PicardDivergence(os.str());
      }
      len = std::max<std::size_t>(1, len / 2);
    }
    const PathSegment& path = local->path;
    std::size_t trigger = path.steps();
    for (std::size_t i = 1; i <= path.steps(); ++i)
      if (path.xi_sq(i) >= budget) {
        trigger = i;
        break;
      }
    for (std::size_t i = 1; i <= trigger; ++i) {
      out.trajectory.append(path.state(i));
      if (out.trajectory.xi_sq(out.trajectory.steps()) > cfg.xi_ceiling) {
        std::ostringstream os;
        os << "blow-up: accumulated int ||u||^2 exceeded " << cfg.xi_ceiling << " at t = "
           << out.trajectory.t_end() << " (the dissipation integral diverges at a finite maximal time)";
        out.blowup_flag = true;
        out.blowup_reason = os.str();
        local->report.window_end = out.trajectory.t_end();
        out.windows.push_back(std::move(local->report));
        return out;
      }
    }
    k += trigger;
    state = path.state(trigger);
    out.stop_times.push_back(grid.time(k));
    local->report.window_end = grid.time(k);
    out.windows.push_back(std::move(local->report));
  }
  return out;
}

SolveOutcome global_solve(const GalerkinVector& u0, const System& sys, const SolverConfig& cfg) {
  double m = cfg.m;
  for (std::size_t e = 0;; ++e) {
    SolveOutcome out = concatenate_m_solution(u0, sys, cfg, m);
    out.escalations = e;
    if (out.blowup_flag) return out;
    if (sup_h_norm(out.trajectory) < m) return out;
    if (e == cfg.max_m_escalations) {
      std::ostringstream os;
      os << "blow-up: |u| reached the cutoff level m = " << m << " after " << e << " escalations";
      out.blowup_flag = true;
      out.blowup_reason = os.str();
      return out;
    }
    m *= cfg.m_growth;
  }
}

PathSegment baseline_direct(const GalerkinVector& u0, const System& sys, const SolverConfig& cfg,
                            std::optional<double> m) {
  cfg.validate();
  check_grid(cfg, sys);
  const TimeGrid& grid = sys.noise.grid();
  PathSegment out(grid.t0, grid.dt, sys.model.basis(), u0);
  for (std::size_t k = 0; k < grid.steps; ++k) {
    const GalerkinVector& y = out.back();
    const double c = m ? 1.0 - smoothstep(h_norm(y) - *m) : 1.0;
    out.append(scheme_step(y, y, y, c, k, sys, cfg.stepper));
  }
  return out;
}

double sup_h_norm(const PathSegment& path) {
  double s = 0.0;
  for (const auto& y : path.states()) s = std::max(s, h_norm(y));
  return s;
}

double sup_distance(const PathSegment& a, const PathSegment& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: paths differ in length");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, h_norm(a.state(k) - b.state(k)));
  return s;
}

}  // namespace levyspde
