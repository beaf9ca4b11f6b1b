#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <ohx/error.hpp>
#include <ohx/flux.hpp>
#include <ohx/grid.hpp>
#include <ohx/solver.hpp>

namespace ohx::cli {

/// Malformed or incomplete configuration (exit status 2).
class ConfigError : public ohx::Error {
public:
  using ohx::Error::Error;
};

struct RunConfig {
  std::filesystem::path source;
  /// Flattened "section.key" -> raw value, as read.
  std::map<std::string, std::string> entries;

  FluxSpec flux;

  InitialData init;
  std::string profile;
  bool enforce_zero_mean = true;
  std::optional<double> mollify;

  double x_max = 30.0;
  int n = 600;
  bool grid_override = false;

  SolverConfig solver;

  std::filesystem::path out_dir = "ohx-out";
  bool dump_primitive = false;
  /// Every k-th snapshot goes to snapshots.csv (the final one always does).
  int output_stride = 1;

  std::vector<double> eps_list;

  double stability_r = 10.0;
  std::optional<std::uint64_t> stability_seed;
  double stability_amplitude = 0.05;

  int c_quantiles = 9;
  int n_testfns = 20;
  std::optional<std::uint64_t> entropy_seed;

  std::vector<int> n_list;
  double min_order = 1.8;

  /// Snapshot CSV certified instead of a fresh solve.
  std::optional<std::filesystem::path> import;
};

/// Reads an INI file (`[section]`, `key = value`, `#` or `;` comments).
/// Unknown keys, malformed numbers and unreadable tables raise ConfigError
/// naming the key (and the line, for syntax errors).
RunConfig load_config(const std::filesystem::path& path);

/// Same, from text; relative table paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

/// Two-column numeric CSV with a header row; throws ConfigError on
/// malformed rows.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};
Table read_table(const std::filesystem::path& path, std::size_t columns);

}  // namespace ohx::cli
