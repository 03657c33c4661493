#include "levyspde_tools/commands.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "levyspde/checks.hpp"
#include "levyspde/parallel.hpp"

namespace levyspde::tools {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchemaVersion = "1";

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Resolved config as {section: {key: text}}, in canonical order.
Json config_json(const RunConfig& cfg) {
  Json out = Json::object();
  std::istringstream in(emit_config(cfg));
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      out[section] = Json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    out[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

Json header(const std::string& kind, const RunConfig& cfg) {
  Json j;
  j["schema"] = "levyspde." + kind + "/" + kSchemaVersion;
  j["seed"] = cfg.ensemble.seed;
  j["config"] = config_json(cfg);
  return j;
}

void write_json(const fs::path& file, const Json& j) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << j.dump(2) << "\n";
}

Json constants_json(const NoiseConstants& c) {
  return Json{{"L1", c.l1}, {"L2", c.l2}, {"L3", c.l3}, {"L4", c.l4}, {"L5", c.l5}};
}

Json model_json(const ModelSpec& m) {
  return Json{{"name", m.name()}, {"dim", m.dim()}, {"viscosity", m.basis().viscosity()}, {"a0", m.a0()},
              {"c_b", m.c_b()}};
}

Json order_json(const OrderStudy& s) {
  return Json{{"dts", s.dts},         {"metric", s.metric},   {"orders", s.orders},
              {"threshold", s.threshold}, {"min_order", s.orders.empty() ? 0.0 : s.min_order()},
              {"passed", s.passed()}};
}

Json moment_json(const MomentStat& s) {
  return Json{{"mean", s.mean}, {"se", s.se}, {"expected", s.expected}, {"ok", s.ok()}};
}

Json contraction_json(const ContractionReport& r) {
  return Json{{"paths", r.paths},         {"a", r.a},
              {"b", r.b},                 {"ratio_a", r.ratio_a},
              {"ratio_b", r.ratio_b},     {"partial_a", r.partial_a},
              {"partial_b", r.partial_b}};
}

struct Bundle {
  ModelPtr model;
  CoefficientSpec coeff;
  GalerkinVector u0;
};

Bundle build(const RunConfig& cfg) {
  ModelPtr model = build_model(cfg.model);
  CoefficientSpec coeff = build_coefficients(cfg, model->basis());
  GalerkinVector u0 = build_initial(cfg, model->dim());
  return {std::move(model), std::move(coeff), std::move(u0)};
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

void write_trajectory_csv(std::ostream& os, const PathSegment& path, bool per_mode) {
  os << "t,h_norm,v_norm,xi_sq";
  const std::size_t n = path.basis().dim();
  if (per_mode)
    for (std::size_t j = 0; j < n; ++j) os << ",c" << j;
  os << "\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    const GalerkinVector& y = path.state(k);
    os << fmt17(path.time(k)) << ',' << fmt17(h_norm(y)) << ',' << fmt17(v_norm(y, path.basis())) << ','
       << fmt17(path.xi_sq(k));
    if (per_mode)
      for (std::size_t j = 0; j < n; ++j) os << ',' << fmt17(y[j]);
    os << "\n";
  }
}

// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const Bundle b = build(cfg);
  const std::size_t M = cfg.ensemble.paths;
  const TimeGrid grid = cfg.solver.grid();
  fs::create_directories(out_dir);

  struct Result {
    std::optional<SolveOutcome> outcome;
    std::string failure;
  };
  std::vector<Result> results(M);
  parallel_for(M, [&](std::size_t i) {
    const std::uint64_t seed = path_seed(cfg.ensemble.seed, i);
    const NoiseRealization noise =
        sample_realization(grid, b.coeff.measure(), WienerDriverSpec{b.coeff.wiener_dims()}, seed);
    const System sys{*b.model, b.coeff, noise};
    try {
      results[i].outcome = global_solve(b.u0, sys, cfg.solver);
    } catch (const PicardDivergence& e) {
      results[i].failure = e.what();
    }
  });

  Json summary = header("simulate", cfg);
  summary["model"] = model_json(*b.model);
  summary["constants"] = constants_json(b.coeff.constants());
  summary["paths"] = M;
  Json paths = Json::array();
  bool ok = true;
  for (std::size_t i = 0; i < M; ++i) {
    Json p;
    p["index"] = i;
    p["seed"] = path_seed(cfg.ensemble.seed, i);
    const Result& r = results[i];
    if (!r.outcome) {
      ok = false;
      p["status"] = "picard_divergence";
      p["message"] = r.failure;
      log << "path " << i << ": " << r.failure << "\n";
      paths.push_back(p);
      continue;
    }
    const SolveOutcome& o = *r.outcome;
    {
      std::ofstream os(out_dir / ("trajectory_" + std::to_string(i) + ".csv"), std::ios::binary);
      write_trajectory_csv(os, o.trajectory, cfg.output.per_mode);
    }
    p["status"] = o.blowup_flag ? "blowup" : "ok";
    if (o.blowup_flag) {
      ok = false;
      p["message"] = o.blowup_reason;
      log << "path " << i << ": " << o.blowup_reason << "\n";
    }
    p["m_final"] = o.m_final;
    p["escalations"] = o.escalations;
    p["stop_times"] = o.stop_times;
    p["steps_completed"] = o.trajectory.steps();
    p["final_h_norm"] = h_norm(o.trajectory.back());
    p["sup_h_norm"] = sup_h_norm(o.trajectory);
    p["xi_sq_total"] = o.trajectory.xi_sq(o.trajectory.size() - 1);
    Json windows = Json::array();
    for (const auto& w : o.windows)
      windows.push_back(Json{{"start", w.window_start},
                             {"end", w.window_end},
                             {"iterations", w.iterations_used},
                             {"converged", w.converged}});
    p["windows"] = windows;
    paths.push_back(p);
  }
  summary["results"] = paths;
  summary["status"] = ok ? "pass" : "fail";
  write_json(out_dir / "summary.json", summary);
  log << "simulate: " << M << " path(s), " << verdict(ok) << "\n";
  return ok ? kPass : kInvariantFailure;
}

// ---------------------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const Bundle b = build(cfg);
  const std::uint64_t seed = cfg.ensemble.seed;
  const TimeGrid grid = cfg.solver.grid();
  fs::create_directories(out_dir);
  Json suites = Json::object();
  bool all_ok = true;
  auto finish = [&](const std::string& suite, Json rep, bool ok) {
    Json j = header("verify." + suite, cfg);
    j["model"] = model_json(*b.model);
    j["report"] = std::move(rep);
    j["passed"] = ok;
    write_json(out_dir / ("report_" + suite + ".json"), j);
    suites[suite] = ok;
    all_ok = all_ok && ok;
    log << "verify " << suite << ": " << verdict(ok) << "\n";
  };

  {
    const StructureReport s = structure_check(*b.model, cfg.verify.structure_samples, seed);
    Json rep{{"samples", s.samples},
             {"skew_tolerance", s.skew_tolerance},
             {"max_skew_ratio", s.max_skew_ratio},
             {"skew_violations", s.skew_violations},
             {"max_apply_defect", s.max_apply_defect},
             {"max_interp_ratio", s.max_interp_ratio},
             {"interp_violations", s.interp_violations},
             {"max_bound_ratio", s.max_bound_ratio},
             {"bound_violations", s.bound_violations}};
    bool ok = s.passed();
    if (cfg.model.name == "nse2d") {
      const Nse2dParams p{cfg.model.modes_per_axis, cfg.model.visc, cfg.model.dealias};
      const double a1 = nse_estimate_a0(p, cfg.model.a0_samples, seed);
      const double a2 = nse_estimate_a0(p, 2 * cfg.model.a0_samples, seed + 1);
      const bool stable = std::abs(a2 / a1 - 1.0) <= 0.2;
      rep["a0_estimate"] = a1;
      rep["a0_estimate_doubled"] = a2;
      rep["a0_stable"] = stable;
      ok = ok && stable;
    }
    finish("structure", rep, ok);
  }
  {
    const ConditionReport c = empirical_condition_check(b.coeff, cfg.verify.condition_samples, seed);
    Json rep{{"constants", constants_json(b.coeff.constants())},
             {"samples", c.samples},
             {"max_ratio_lipschitz", c.max_ratio_lipschitz},
             {"max_ratio_growth", c.max_ratio_growth},
             {"tolerance", c.tolerance}};
    finish("coefficients", rep, c.passed());
  }
  {
    const NoiseMomentReport n = noise_moment_check(b.coeff, b.u0, grid, cfg.verify.noise_paths, seed);
    Json comp = Json::array(), wmean = Json::array();
    for (const auto& s : n.compensated_mean) comp.push_back(moment_json(s));
    for (const auto& s : n.wiener_mean) wmean.push_back(moment_json(s));
    Json rep{{"paths", n.paths},
             {"jump_count", moment_json(n.jump_count)},
             {"compensated_mean", comp},
             {"jump_isometry", moment_json(n.jump_isometry)},
             {"wiener_mean", wmean},
             {"wiener_isometry", moment_json(n.wiener_isometry)}};
    finish("noise", rep, n.passed());
  }
  {
    std::vector<double> dts{cfg.solver.dt};
    for (std::size_t l = 1; l < std::max<std::size_t>(cfg.verify.ledger_levels, 2); ++l)
      dts.push_back(dts.back() / 2.0);
    const OrderStudy drift = ledger_order_study(*b.model, b.coeff, b.u0, cfg.solver, dts, false, 1, seed, 0.9);
    Json rep{{"drift_only", order_json(drift)}};
    bool ok = drift.passed();
    if (b.coeff.has_noise()) {
      const OrderStudy noisy =
          ledger_order_study(*b.model, b.coeff, b.u0, cfg.solver, dts, true, cfg.verify.ledger_paths, seed, 0.4);
      rep["with_noise"] = order_json(noisy);
      ok = ok && noisy.passed();
    }
    finish("energy", rep, ok);
  }
  {
    const std::size_t M = cfg.verify.apriori_paths;
    std::vector<std::optional<PathSegment>> paths(M);
    std::vector<std::string> failures(M);
    parallel_for(M, [&](std::size_t i) {
      const NoiseRealization noise = sample_realization(grid, b.coeff.measure(),
                                                        WienerDriverSpec{b.coeff.wiener_dims()}, path_seed(seed, i));
      const System sys{*b.model, b.coeff, noise};
      try {
        SolveOutcome o = global_solve(b.u0, sys, cfg.solver);
        if (o.blowup_flag)
          failures[i] = o.blowup_reason;
        else
          paths[i] = std::move(o.trajectory);
      } catch (const PicardDivergence& e) {
        failures[i] = e.what();
      }
    });
    Json rep;
    bool ok = true;
    std::vector<PathSegment> done;
    for (std::size_t i = 0; i < M; ++i) {
      if (paths[i]) {
        done.push_back(std::move(*paths[i]));
      } else {
        ok = false;
        rep["failures"].push_back(Json{{"path", i}, {"message", failures[i]}});
      }
    }
    if (ok) {
      const AprioriReport a = apriori_check(done, b.coeff);
      rep = Json{{"paths", a.paths},
                 {"mean_initial_energy", a.mean_initial_energy},
                 {"forcing_integral", a.forcing_integral},
                 {"sup_mean_energy", a.sup_mean_energy},
                 {"sup_mean_energy_se", a.sup_mean_energy_se},
                 {"sup_time", a.sup_time},
                 {"mean_dissipation", a.mean_dissipation},
                 {"mean_dissipation_se", a.mean_dissipation_se},
                 {"bound", a.bound},
                 {"bound_dissipation", a.bound_dissipation},
                 {"energy_ok", a.energy_ok},
                 {"dissipation_ok", a.dissipation_ok}};
      ok = a.passed();
    }
    finish("apriori", rep, ok);
  }

  Json summary = header("verify", cfg);
  summary["model"] = model_json(*b.model);
  summary["constants"] = constants_json(b.coeff.constants());
  summary["suites"] = suites;
  summary["status"] = all_ok ? "pass" : "fail";
  write_json(out_dir / "summary.json", summary);
  return all_ok ? kPass : kInvariantFailure;
}

// ---------------------------------------------------------------------------

int cmd_converge(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const Bundle b = build(cfg);
  const auto& cc = cfg.converge;
  fs::create_directories(out_dir);
  auto or_default = [](const std::vector<double>& v, double d) { return v.empty() ? std::vector<double>{d} : v; };
  const auto T0s = or_default(cc.T0_list, cfg.solver.T0);
  const auto deltas = or_default(cc.delta0_list, cfg.solver.delta0);
  const auto dts = or_default(cc.dt_list, cfg.solver.dt);

  Json sweep = Json::array();
  bool ok = true;
  for (double T0 : T0s)
    for (double delta0 : deltas)
      for (double dt : dts) {
        SolverConfig sc = cfg.solver;
        sc.T0 = T0;
        sc.delta0 = delta0;
        sc.dt = dt;
        const auto reports = picard_ensemble(*b.model, b.coeff, b.u0, sc, cc.paths, cfg.ensemble.seed);
        std::size_t converged = 0;
        for (const auto& r : reports) converged += r.converged ? 1 : 0;
        const ContractionReport rep = contraction_report(reports);
        const bool within = contraction_within(rep, cc.ratio_limit, cc.ratio_first, cc.ratio_last);
        const bool point_ok = within && converged == reports.size();
        ok = ok && point_ok;
        Json p{{"T0", T0}, {"delta0", delta0}, {"dt", dt}, {"converged_paths", converged}};
        p["contraction"] = contraction_json(rep);
        p["ratio_limit"] = cc.ratio_limit;
        p["ratios_within_limit"] = within;
        p["passed"] = point_ok;
        sweep.push_back(p);
        log << "converge T0=" << T0 << " delta0=" << delta0 << " dt=" << dt << ": " << verdict(point_ok) << "\n";
      }

  Json report = header("converge", cfg);
  report["model"] = model_json(*b.model);
  report["constants"] = constants_json(b.coeff.constants());
  report["sweep"] = sweep;
  if (cc.order_levels >= 2 && b.coeff.has_noise()) {
    const OrderStudy s = strong_order_study(*b.model, b.coeff, b.u0, cfg.solver, cc.order_levels, cc.order_paths,
                                            cfg.ensemble.seed, 0.4);
    report["strong_order"] = order_json(s);
    ok = ok && s.passed();
    log << "converge strong order " << (s.orders.empty() ? 0.0 : s.min_order()) << ": " << verdict(s.passed())
        << "\n";
  }
  report["status"] = ok ? "pass" : "fail";
  write_json(out_dir / "report_converge.json", report);
  return ok ? kPass : kInvariantFailure;
}

}  // namespace levyspde::tools
