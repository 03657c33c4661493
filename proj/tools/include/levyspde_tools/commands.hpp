#pragma once

#include <filesystem>
#include <iosfwd>

#include "levyspde/config.hpp"

namespace levyspde::tools {

enum ExitCode : int { kPass = 0, kInvariantFailure = 1, kUsageError = 2 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "LEVYSPDE_OUT";

// Each command writes its files under out_dir, prints a short human summary
// to log and returns an ExitCode. Config errors propagate as ConfigError.
int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_converge(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// CSV of one trajectory: t, h_norm, v_norm, xi_sq[, c0, c1, ...], %.17g.
void write_trajectory_csv(std::ostream& os, const PathSegment& path, bool per_mode);

}  // namespace levyspde::tools
