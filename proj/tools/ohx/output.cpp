#include "output.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include <ohx/nonlocal.hpp>

namespace ohx::cli {
namespace {

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", digest[k]);
  return hex;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string snapshots_csv(const RunHistory& history, bool with_primitive, int stride) {
  std::string out = with_primitive ? "t,x,u,P\n" : "t,x,u\n";
  const std::size_t m = history.snapshots.size();
  for (std::size_t k = 0; k < m; ++k) {
    if (k % static_cast<std::size_t>(stride) != 0 && k + 1 != m) continue;
    const Snapshot& s = history.snapshots[k];
    for (int i = 0; i < history.grid.n(); ++i) {
      const auto ii = static_cast<std::size_t>(i);
      if (with_primitive)
        out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", s.time(), history.grid.center(i), s.u.values[ii],
                           s.p.values[ii]);
      else
        out += fmt::format("{:.17g},{:.17g},{:.17g}\n", s.time(), history.grid.center(i), s.u.values[ii]);
    }
  }
  return out;
}

RunHistory read_snapshots(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open snapshot file " + path.string());
  std::string line;
  if (!std::getline(file, line) || (line != "t,x,u" && line != "t,x,u,P"))
    throw ConfigError(path.string() + ": expected header 't,x,u' or 't,x,u,P'");

  std::vector<double> times;
  std::vector<std::vector<double>> xs, us;
  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[3];
    for (double& x : v) {
      if (!std::getline(ss, cell, ',')) throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": short row");
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": malformed number '" + cell + "'");
    }
    if (times.empty() || v[0] != times.back()) {
      if (!times.empty() && !(v[0] > times.back()))
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": times must increase");
      times.push_back(v[0]);
      xs.emplace_back();
      us.emplace_back();
    }
    xs.back().push_back(v[1]);
    us.back().push_back(v[2]);
  }
  if (times.size() < 2) throw ConfigError(path.string() + ": need at least two time levels");

  const std::size_t n = xs.front().size();
  if (n < 4) throw ConfigError(path.string() + ": need at least 4 cells per time level");
  const double dx = (xs.front().back() - xs.front().front()) / static_cast<double>(n - 1);
  RunHistory h;
  h.grid = make_grid(dx * static_cast<double>(n), static_cast<int>(n));
  h.flux_name = "imported";
  h.config.t_end = times.back();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (us[k].size() != n) throw ConfigError(path.string() + ": every time level needs the same cells");
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(xs[k][i] - h.grid.center(static_cast<int>(i))) > 0.01 * dx)
        throw ConfigError(path.string() + ": x column is not a uniform cell-centered grid");
    Field u{h.grid, us[k], times[k]};
    check_field(u);
    Primitive p = cumulative_primitive(u);
    h.snapshots.push_back({std::move(u), std::move(p)});
  }
  return h;
}

std::string trend_csv(const std::vector<double>& levels, const std::vector<double>& values,
                      const std::vector<double>* ratios) {
  std::string out = "level,value,ratio\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::string ratio;
    if (ratios) {
      if (k < ratios->size() && std::isfinite((*ratios)[k])) ratio = fmt::format("{:.17g}", (*ratios)[k]);
    } else if (k > 0 && values[k - 1] != 0.0) {
      ratio = fmt::format("{:.17g}", values[k] / values[k - 1]);
    }
    out += fmt::format("{:.17g},{:.17g},{}\n", levels[k], values[k], ratio);
  }
  return out;
}

nlohmann::json to_json(const EstimateReport& r) {
  nlohmann::json extras = nlohmann::json::object();
  for (const auto& [key, value] : r.extras) extras[key] = value;
  return {{"name", r.name},       {"lhs", r.lhs},     {"rhs", r.rhs},   {"margin", r.margin},
          {"pass", r.pass},       {"tolerance", r.tolerance}, {"trend", r.trend}, {"extras", extras},
          {"detail", r.detail}};
}

nlohmann::json to_json(const FluxConstants& c, double m) {
  return {{"C", c.C}, {"L", c.L}, {"L1", c.L1}, {"M", m}};
}

nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"warn_only", c.warn_only}, {"detail", c.detail}});
  return {{"name", "validate-flux"},
          {"pass", r.passed()},
          {"checks", checks},
          {"sup_fu", r.sup_fu},
          {"sup_fxu", r.sup_fxu},
          {"sup_fx_over_u", r.sup_fx_over_u},
          {"lipschitz_fx", r.lipschitz_fx},
          {"min_abs_fuu", r.min_abs_fuu},
          {"nonlinear_fraction", r.nonlinear_fraction},
          {"max_derivative_mismatch", r.max_derivative_mismatch},
          {"decay", {{"left_f", r.decay_left_f}, {"left_fx", r.decay_left_fx},
                     {"right_f", r.decay_right_f}, {"right_fx", r.decay_right_fx}}},
          {"measured", {{"C", r.measured.C}, {"L", r.measured.L}, {"L1", r.measured.L1}}},
          {"effective", {{"C", r.effective.C}, {"L", r.effective.L}, {"L1", r.effective.L1}}}};
}

Manifest::Manifest(std::string command, const RunConfig* config)
    : start_(std::chrono::system_clock::now()), start_steady_(std::chrono::steady_clock::now()) {
  doc_["tool"] = "ohx";
  doc_["version"] = OHX_VERSION;
  doc_["command"] = std::move(command);
  doc_["files"] = nlohmann::json::array();
  doc_["warnings"] = nlohmann::json::array();
  if (config) {
    doc_["config"] = config->entries;
    dir_ = config->out_dir;
  }
}

void Manifest::emit(const std::string& name, const std::string& bytes) {
  write_file(dir_ / name, bytes);
  doc_["files"].push_back({{"name", name}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
}

void Manifest::set_constants(const FluxConstants& constants, double m) { doc_["constants"] = to_json(constants, m); }

void Manifest::warn(const std::string& message) { doc_["warnings"].push_back(message); }

void Manifest::set_status(int exit_code, const std::string& message) {
  doc_["exit_code"] = exit_code;
  doc_["status"] = message;
}

void Manifest::set(const std::string& key, nlohmann::json value) { doc_[key] = std::move(value); }

void Manifest::finish() {
  const auto end = std::chrono::system_clock::now();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_steady_).count();
  nlohmann::json doc = doc_;
  doc["wall"] = {{"start", iso_time(start_)}, {"end", iso_time(end)}, {"seconds", seconds}};
  write_file(dir_ / "manifest.json", doc.dump(2) + "\n");
}

}  // namespace ohx::cli
