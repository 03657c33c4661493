#include "levyspde/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace levyspde {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest text that reads back to the same double.
std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const std::string t = trim(s);
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  auto res = std::from_chars(first, t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("expected a number, got '" + t + "'");
  return x;
}

std::uint64_t parse_uint(const std::string& s) {
  std::uint64_t x = 0;
  const std::string t = trim(s);
  auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("expected a non-negative integer, got '" + t + "'");
  return x;
}

bool parse_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("expected true/false, got '" + t + "'");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  const std::string t = trim(s);
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  return out;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(v[i]);
  }
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class M>
Field dbl(std::string sec, std::string key, M member) {
  return {sec, key, [member](RunConfig& c, const std::string& v) { std::invoke(member, c) = parse_double(v); },
          [member](const RunConfig& c) { return fmt_double(std::invoke(member, c)); }};
}

template <class M>
Field uint(std::string sec, std::string key, M member) {
  return {sec, key,
          [member](RunConfig& c, const std::string& v) {
            using T = std::remove_reference_t<decltype(std::invoke(member, c))>;
            std::invoke(member, c) = static_cast<T>(parse_uint(v));
          },
          [member](const RunConfig& c) { return std::to_string(std::invoke(member, c)); }};
}

template <class M>
Field flag(std::string sec, std::string key, M member) {
  return {sec, key, [member](RunConfig& c, const std::string& v) { std::invoke(member, c) = parse_bool(v); },
          [member](const RunConfig& c) { return std::string(std::invoke(member, c) ? "true" : "false"); }};
}

template <class M>
Field str(std::string sec, std::string key, M member) {
  return {sec, key, [member](RunConfig& c, const std::string& v) { std::invoke(member, c) = trim(v); },
          [member](const RunConfig& c) { return std::invoke(member, c); }};
}

template <class M>
Field list(std::string sec, std::string key, M member) {
  return {sec, key, [member](RunConfig& c, const std::string& v) { std::invoke(member, c) = parse_list(v); },
          [member](const RunConfig& c) { return fmt_list(std::invoke(member, c)); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    // model
    f.push_back(str("model", "name", [](auto& c) -> auto& { return c.model.name; }));
    f.push_back(uint("model", "modes", [](auto& c) -> auto& { return c.model.modes; }));
    f.push_back(dbl("model", "k0", [](auto& c) -> auto& { return c.model.k0; }));
    f.push_back(dbl("model", "visc", [](auto& c) -> auto& { return c.model.visc; }));
    f.push_back(uint("model", "modes_per_axis", [](auto& c) -> auto& { return c.model.modes_per_axis; }));
    f.push_back(flag("model", "dealias", [](auto& c) -> auto& { return c.model.dealias; }));
    f.push_back(uint("model", "a0_samples", [](auto& c) -> auto& { return c.model.a0_samples; }));
    // measure
    f.push_back(str("measure", "family", [](auto& c) -> auto& { return c.measure.family; }));
    f.push_back(dbl("measure", "rate", [](auto& c) -> auto& { return c.measure.rate; }));
    f.push_back(dbl("measure", "mean", [](auto& c) -> auto& { return c.measure.mean; }));
    f.push_back(dbl("measure", "sd", [](auto& c) -> auto& { return c.measure.sd; }));
    f.push_back(dbl("measure", "c", [](auto& c) -> auto& { return c.measure.c; }));
    f.push_back(dbl("measure", "alpha", [](auto& c) -> auto& { return c.measure.alpha; }));
    f.push_back(dbl("measure", "eps_low", [](auto& c) -> auto& { return c.measure.eps_low; }));
    f.push_back(dbl("measure", "r_high", [](auto& c) -> auto& { return c.measure.r_high; }));
    // coefficient
    f.push_back(str("coefficient", "g_family", [](auto& c) -> auto& { return c.coefficient.g_family; }));
    f.push_back(list("coefficient", "g_sigma", [](auto& c) -> auto& { return c.coefficient.g_sigma; }));
    f.push_back(dbl("coefficient", "g_theta", [](auto& c) -> auto& { return c.coefficient.g_theta; }));
    f.push_back(uint("coefficient", "g_active_modes", [](auto& c) -> auto& { return c.coefficient.g_active_modes; }));
    f.push_back(str("coefficient", "psi_family", [](auto& c) -> auto& { return c.coefficient.psi_family; }));
    f.push_back(list("coefficient", "psi_sigma", [](auto& c) -> auto& { return c.coefficient.psi_sigma; }));
    f.push_back(dbl("coefficient", "psi_theta", [](auto& c) -> auto& { return c.coefficient.psi_theta; }));
    f.push_back(uint("coefficient", "psi_active_modes", [](auto& c) -> auto& { return c.coefficient.psi_active_modes; }));
    f.push_back(uint("coefficient", "wiener_dims", [](auto& c) -> auto& { return c.coefficient.wiener_dims; }));
    f.push_back(list("coefficient", "forcing", [](auto& c) -> auto& { return c.coefficient.forcing; }));
    // initial
    f.push_back(list("initial", "u0", [](auto& c) -> auto& { return c.u0; }));
    // solver
    f.push_back(dbl("solver", "T", [](auto& c) -> auto& { return c.solver.T; }));
    f.push_back(dbl("solver", "dt", [](auto& c) -> auto& { return c.solver.dt; }));
    f.push_back(dbl("solver", "tol_picard", [](auto& c) -> auto& { return c.solver.tol_picard; }));
    f.push_back(uint("solver", "max_picard", [](auto& c) -> auto& { return c.solver.max_picard; }));
    f.push_back(dbl("solver", "T0", [](auto& c) -> auto& { return c.solver.T0; }));
    f.push_back(dbl("solver", "delta0", [](auto& c) -> auto& { return c.solver.delta0; }));
    f.push_back(dbl("solver", "m", [](auto& c) -> auto& { return c.solver.m; }));
    f.push_back(dbl("solver", "m_growth", [](auto& c) -> auto& { return c.solver.m_growth; }));
    f.push_back(uint("solver", "max_m_escalations", [](auto& c) -> auto& { return c.solver.max_m_escalations; }));
    f.push_back({"solver", "stepper",
                 [](RunConfig& c, const std::string& v) { c.solver.stepper = stepper_from_string(trim(v)); },
                 [](const RunConfig& c) { return to_string(c.solver.stepper); }});
    f.push_back({"solver", "inner_mode",
                 [](RunConfig& c, const std::string& v) { c.solver.inner_mode = inner_mode_from_string(trim(v)); },
                 [](const RunConfig& c) { return to_string(c.solver.inner_mode); }});
    f.push_back(uint("solver", "max_inner", [](auto& c) -> auto& { return c.solver.max_inner; }));
    f.push_back(dbl("solver", "tol_inner", [](auto& c) -> auto& { return c.solver.tol_inner; }));
    f.push_back(dbl("solver", "xi_ceiling", [](auto& c) -> auto& { return c.solver.xi_ceiling; }));
    f.push_back(uint("solver", "max_T0_halvings", [](auto& c) -> auto& { return c.solver.max_T0_halvings; }));
    f.push_back(flag("solver", "record_diagnostics", [](auto& c) -> auto& { return c.solver.record_diagnostics; }));
    // ensemble / output
    f.push_back(uint("ensemble", "paths", [](auto& c) -> auto& { return c.ensemble.paths; }));
    f.push_back(uint("ensemble", "seed", [](auto& c) -> auto& { return c.ensemble.seed; }));
    f.push_back(str("output", "dir", [](auto& c) -> auto& { return c.output.dir; }));
    f.push_back(flag("output", "per_mode", [](auto& c) -> auto& { return c.output.per_mode; }));
    // converge
    f.push_back(list("converge", "T0_list", [](auto& c) -> auto& { return c.converge.T0_list; }));
    f.push_back(list("converge", "delta0_list", [](auto& c) -> auto& { return c.converge.delta0_list; }));
    f.push_back(list("converge", "dt_list", [](auto& c) -> auto& { return c.converge.dt_list; }));
    f.push_back(uint("converge", "paths", [](auto& c) -> auto& { return c.converge.paths; }));
    f.push_back(uint("converge", "order_levels", [](auto& c) -> auto& { return c.converge.order_levels; }));
    f.push_back(uint("converge", "order_paths", [](auto& c) -> auto& { return c.converge.order_paths; }));
    f.push_back(dbl("converge", "ratio_limit", [](auto& c) -> auto& { return c.converge.ratio_limit; }));
    f.push_back(uint("converge", "ratio_first", [](auto& c) -> auto& { return c.converge.ratio_first; }));
    f.push_back(uint("converge", "ratio_last", [](auto& c) -> auto& { return c.converge.ratio_last; }));
    // verify
    f.push_back(uint("verify", "structure_samples", [](auto& c) -> auto& { return c.verify.structure_samples; }));
    f.push_back(uint("verify", "condition_samples", [](auto& c) -> auto& { return c.verify.condition_samples; }));
    f.push_back(uint("verify", "noise_paths", [](auto& c) -> auto& { return c.verify.noise_paths; }));
    f.push_back(uint("verify", "apriori_paths", [](auto& c) -> auto& { return c.verify.apriori_paths; }));
    f.push_back(uint("verify", "ledger_levels", [](auto& c) -> auto& { return c.verify.ledger_levels; }));
    f.push_back(uint("verify", "ledger_paths", [](auto& c) -> auto& { return c.verify.ledger_paths; }));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

void apply(RunConfig& cfg, const Field& f, const std::string& value, const std::string& where) {
  try {
    f.set(cfg, value);
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + f.section + "." + f.key + ": " + e.what());
  }
}

void validate(const RunConfig& cfg) {
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.ensemble.paths < 1) throw ConfigError("ensemble.paths must be >= 1");
  if (cfg.model.name != "dyadic" && cfg.model.name != "nse2d" && cfg.model.name != "linear")
    throw ConfigError("model.name: unknown model '" + cfg.model.name + "' (dyadic | nse2d | linear)");
  try {
    const SpectralBasis basis = build_basis(cfg.model);
    if (cfg.u0.size() > basis.dim())
      throw ConfigError("initial.u0 has " + std::to_string(cfg.u0.size()) + " entries but the model has " +
                        std::to_string(basis.dim()) + " modes");
    (void)build_coefficients(cfg, basis);  // certifies L1..L5
  } catch (const ConditionViolation& e) {
    throw ConfigError(e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return emit_config(*this) == emit_config(o);
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::vector<std::string> seen;
  bool have_name = false;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      const bool known = std::any_of(fields().begin(), fields().end(),
                                     [&](const Field& f) { return f.section == section; });
      if (!known) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const Field* f = find_field(section, key);
    if (!f) throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
    const std::string full = section + "." + key;
    if (std::find(seen.begin(), seen.end(), full) != seen.end())
      throw ConfigError(where + ": duplicate key " + full);
    seen.push_back(full);
    apply(cfg, *f, line.substr(eq + 1), where);
    if (full == "model.name") have_name = true;
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    const auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + ov + "': expected section.key=value");
    const std::string sec = trim(ov.substr(0, dot));
    const std::string key = trim(ov.substr(dot + 1, eq - dot - 1));
    const Field* f = find_field(sec, key);
    if (!f) throw ConfigError("override '" + ov + "': unknown key " + sec + "." + key);
    apply(cfg, *f, ov.substr(eq + 1), "override");
    if (sec == "model" && key == "name") have_name = true;
  }
  if (!have_name) throw ConfigError("missing required key model.name");
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string emit_config(const RunConfig& cfg) {
  std::string out, section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.get(cfg) + "\n";
  }
  return out;
}

SpectralBasis build_basis(const ModelConfig& cfg) {
  if (cfg.name == "dyadic") return dyadic_basis(DyadicShellParams{cfg.modes, cfg.k0, cfg.visc});
  if (cfg.name == "nse2d") return nse_basis(Nse2dParams{cfg.modes_per_axis, cfg.visc, cfg.dealias});
  if (cfg.name == "linear") return linear_basis(LinearModelParams{cfg.modes, cfg.visc});
  throw ConfigError("unknown model '" + cfg.name + "'");
}

ModelPtr build_model(const ModelConfig& cfg) {
  if (cfg.name == "dyadic") return std::make_shared<DyadicShell>(DyadicShellParams{cfg.modes, cfg.k0, cfg.visc});
  if (cfg.name == "nse2d")
    return make_nse2d(Nse2dParams{cfg.modes_per_axis, cfg.visc, cfg.dealias}, cfg.a0_samples);
  if (cfg.name == "linear") return std::make_shared<LinearModel>(LinearModelParams{cfg.modes, cfg.visc});
  throw ConfigError("unknown model '" + cfg.name + "'");
}

LevyMeasure build_measure(const MeasureConfig& cfg) {
  if (cfg.family == "compound_gaussian") return LevyMeasure::compound_gaussian(cfg.rate, cfg.mean, cfg.sd);
  if (cfg.family == "truncated_power") return LevyMeasure::truncated_power(cfg.c, cfg.alpha, cfg.eps_low, cfg.r_high);
  throw ConfigError("measure.family: unknown family '" + cfg.family + "'");
}

CoefficientSpec build_coefficients(const RunConfig& cfg, const SpectralBasis& basis) {
  const auto& c = cfg.coefficient;
  FamilySpec g{coefficient_family_from_string(c.g_family), c.g_sigma, c.g_theta, c.g_active_modes};
  FamilySpec psi{coefficient_family_from_string(c.psi_family), c.psi_sigma, c.psi_theta, c.psi_active_modes};
  return CoefficientSpec(g, psi, build_measure(cfg.measure), basis, c.wiener_dims, c.forcing);
}

GalerkinVector build_initial(const RunConfig& cfg, std::size_t dim) {
  if (cfg.u0.size() > dim) throw ConfigError("initial.u0 longer than the mode count");
  GalerkinVector u(dim);
  for (std::size_t k = 0; k < cfg.u0.size(); ++k) u[k] = cfg.u0[k];
  if (!u.is_finite()) throw ConfigError("initial.u0 must be finite");
  return u;
}

}  // namespace levyspde
