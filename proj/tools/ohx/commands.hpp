#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace ohx::cli {

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_config = 2, exit_fault = 3 };

/// Loads the config, runs one of validate-flux, run, certify, sweep,
/// converge, and writes manifest.json plus the command's outputs. Never
/// throws; every failure maps to an ExitCode. Progress goes to `log`.
int run_command(const std::string& command, const std::filesystem::path& config,
                const std::optional<std::filesystem::path>& out_dir, std::ostream& log);

}  // namespace ohx::cli
