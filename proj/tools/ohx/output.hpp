#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <ohx/analysis.hpp>
#include <ohx/flux.hpp>
#include <ohx/solver.hpp>

#include "config.hpp"

namespace ohx::cli {

std::string sha256_hex(const std::string& bytes);

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
void write_file(const std::filesystem::path& path, const std::string& bytes);

/// `t,x,u[,P]` rows, 17 significant digits, '\n' line endings. Every
/// `stride`-th snapshot is written; the last one always is.
std::string snapshots_csv(const RunHistory& history, bool with_primitive, int stride);

/// Parses a snapshot CSV back into a history on the grid it implies. P is
/// recomputed from u.
RunHistory read_snapshots(const std::filesystem::path& path);

/// `level,value,ratio`; ratio is value[k] / value[k - 1] (empty for k = 0)
/// unless explicit ratios are passed.
std::string trend_csv(const std::vector<double>& levels, const std::vector<double>& values,
                      const std::vector<double>* ratios = nullptr);

nlohmann::json to_json(const EstimateReport& report);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const FluxConstants& constants, double m);

/// Collects emitted files and renders manifest.json. Everything except
/// the "wall" block is a pure function of the config and the outputs.
class Manifest {
public:
  Manifest(std::string command, const RunConfig* config);

  /// Writes `bytes` under the output directory and records its digest.
  void emit(const std::string& name, const std::string& bytes);
  void set_constants(const FluxConstants& constants, double m);
  void warn(const std::string& message);
  void set_status(int exit_code, const std::string& message);
  void set(const std::string& key, nlohmann::json value);

  const std::filesystem::path& dir() const { return dir_; }
  void set_dir(std::filesystem::path dir) { dir_ = std::move(dir); }

  /// Writes manifest.json; the emitted files are already on disk.
  void finish();

private:
  std::filesystem::path dir_;
  nlohmann::json doc_;
  std::chrono::system_clock::time_point start_;
  std::chrono::steady_clock::time_point start_steady_;
};

}  // namespace ohx::cli
