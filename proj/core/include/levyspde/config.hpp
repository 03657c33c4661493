#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levyspde/models.hpp"
#include "levyspde/noise.hpp"
#include "levyspde/solver_types.hpp"

namespace levyspde {

/// Malformed, unknown or inadmissible configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::string name = "dyadic";  // dyadic | nse2d | linear
  std::size_t modes = 24;
  double k0 = 2.0;
  double visc = 1.0;
  int modes_per_axis = 8;
  bool dealias = true;
  std::size_t a0_samples = 2000;
  bool operator==(const ModelConfig&) const = default;
};

struct MeasureConfig {
  std::string family = "compound_gaussian";  // compound_gaussian | truncated_power
  double rate = 0.0;
  double mean = 0.0;
  double sd = 1.0;
  double c = 1.0;
  double alpha = 1.0;
  double eps_low = 0.1;
  double r_high = 10.0;
  bool operator==(const MeasureConfig&) const = default;
};

struct CoefficientConfig {
  std::string g_family = "none";
  std::vector<double> g_sigma{0.0};
  double g_theta = 0.0;
  std::size_t g_active_modes = 0;
  std::string psi_family = "none";
  std::vector<double> psi_sigma{0.0};
  double psi_theta = 0.0;
  std::size_t psi_active_modes = 0;
  std::size_t wiener_dims = 0;
  std::vector<double> forcing{0.0};
  bool operator==(const CoefficientConfig&) const = default;
};

struct EnsembleConfig {
  std::size_t paths = 1;
  std::uint64_t seed = 1;
  bool operator==(const EnsembleConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  bool per_mode = false;
  bool operator==(const OutputConfig&) const = default;
};

struct ConvergeConfig {
  std::vector<double> T0_list;     // empty: solver.T0
  std::vector<double> delta0_list; // empty: solver.delta0
  std::vector<double> dt_list;     // empty: solver.dt
  std::size_t paths = 50;
  std::size_t order_levels = 3;    // dt-halving levels of the strong-order study (0 disables)
  std::size_t order_paths = 50;
  double ratio_limit = 0.8;        // a_{n+1}/a_n, b_{n+1}/b_n bound for n in [ratio_first, ratio_last]
  std::size_t ratio_first = 2;
  std::size_t ratio_last = 5;
  bool operator==(const ConvergeConfig&) const = default;
};

struct VerifyConfig {
  std::size_t structure_samples = 10000;
  std::size_t condition_samples = 2000;
  std::size_t noise_paths = 10000;
  std::size_t apriori_paths = 200;
  std::size_t ledger_levels = 3;
  std::size_t ledger_paths = 20;
  bool operator==(const VerifyConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  MeasureConfig measure;
  CoefficientConfig coefficient;
  std::vector<double> u0{1.0};
  SolverConfig solver;
  EnsembleConfig ensemble;
  OutputConfig output;
  ConvergeConfig converge;
  VerifyConfig verify;

  bool operator==(const RunConfig& o) const;
};

/// Parses sectioned key = value text. Overrides are "section.key=value"
/// pairs applied on top of the text. Validates admissibility of the noise
/// constants. Throws ConfigError with a location on any problem.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);

SpectralBasis build_basis(const ModelConfig& cfg);
ModelPtr build_model(const ModelConfig& cfg);
LevyMeasure build_measure(const MeasureConfig& cfg);
CoefficientSpec build_coefficients(const RunConfig& cfg, const SpectralBasis& basis);
/// u0 list padded with zeros to the basis dimension.
GalerkinVector build_initial(const RunConfig& cfg, std::size_t dim);

}  // namespace levyspde
