#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "mfg/config.hpp"

namespace mfg {

constexpr const char* artifact_version = "1.0.0";

/// Exit codes of run().
enum ExitStatus : int { exit_ok = 0, exit_usage = 1, exit_not_converged = 2 };

/**
 * Executes the configured mode, writing field CSVs, report JSONs and a
 * manifest.json (always, also on failure) into config.output_dir.
 */
int run(const RunConfig& config, std::ostream& log);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace mfg
