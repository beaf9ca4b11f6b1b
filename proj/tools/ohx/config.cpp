#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ohx::cli {
namespace {

namespace pt = boost::property_tree;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "flux.family",          "flux.a",           "flux.s",          "flux.state_box_m",
      "flux.table",           "init.profile",     "init.mu",         "init.w",
      "init.seed",            "init.enforce_zero_mean", "init.table", "init.x0",
      "init.u_left",          "init.u_right",     "init.width",      "init.left",
      "init.mid",             "init.right",       "init.modes",      "init.lo",
      "init.hi",              "init.amplitude",   "init.mollify",    "grid.x_max",
      "grid.n",               "grid.override",    "solver.epsilon",  "solver.flux_kind",
      "solver.integrator",    "solver.cfl",       "solver.t_end",    "solver.output_stride",
      "solver.nonlocal_source", "output.dir",     "output.dump_primitive", "output.stride",
      "sweep.eps_list",       "stability.R",      "stability.seed_v", "stability.amplitude",
      "entropy.c_quantiles",  "entropy.n_testfns", "entropy.seed",   "converge.n_list",
      "converge.min_order",   "certify.import",
  };
  return keys;
}

std::string trim(std::string s) {
  const auto hash = s.find(" #");
  if (hash != std::string::npos) s.erase(hash);
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("config key '" + key + "': '" + text + "' is not a finite decimal number");
  return v;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& text) {
  Int v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': '" + text + "' is not an integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("config key '" + key + "': '" + text + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
public:
  Reader(const std::map<std::string, std::string>& entries, std::filesystem::path base)
      : entries_(entries), base_(std::move(base)) {}

  const std::string* raw(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void get(const std::string& key, double& v) const {
    if (const auto* r = raw(key)) v = to_double(key, *r);
  }
  void get(const std::string& key, int& v) const {
    if (const auto* r = raw(key)) v = to_integer<int>(key, *r);
  }
  void get(const std::string& key, bool& v) const {
    if (const auto* r = raw(key)) v = to_bool(key, *r);
  }
  void get(const std::string& key, std::string& v) const {
    if (const auto* r = raw(key)) v = *r;
  }
  std::optional<std::uint64_t> seed(const std::string& key) const {
    if (const auto* r = raw(key)) return to_integer<std::uint64_t>(key, *r);
    return std::nullopt;
  }
  std::optional<std::filesystem::path> path(const std::string& key) const {
    if (const auto* r = raw(key)) {
      std::filesystem::path p(*r);
      return p.is_absolute() ? p : base_ / p;
    }
    return std::nullopt;
  }

private:
  const std::map<std::string, std::string>& entries_;
  std::filesystem::path base_;
};

InitialData read_profile(const Reader& in, const std::string& profile) {
  if (profile == "gaussian-dipole") {
    profiles::GaussianDipole p;
    in.get("init.mu", p.mu);
    in.get("init.w", p.w);
    if (!(p.w > 0.0)) throw ConfigError("config key 'init.w': must be positive");
    return p;
  }
  if (profile == "box-dipole") {
    profiles::BoxDipole p;
    in.get("init.left", p.left);
    in.get("init.mid", p.mid);
    in.get("init.right", p.right);
    if (!(p.left < p.mid && p.mid < p.right)) throw ConfigError("box-dipole: need init.left < init.mid < init.right");
    return p;
  }
  if (profile == "random-zero-mean") {
    profiles::RandomZeroMean p;
    const auto seed = in.seed("init.seed");
    if (!seed) throw ConfigError("init.profile = random-zero-mean requires an explicit init.seed");
    p.seed = *seed;
    in.get("init.modes", p.modes);
    in.get("init.lo", p.lo);
    in.get("init.hi", p.hi);
    in.get("init.amplitude", p.amplitude);
    if (p.modes < 1 || !(p.lo < p.hi)) throw ConfigError("random-zero-mean: need init.modes >= 1 and init.lo < init.hi");
    return p;
  }
  if (profile == "riemann-step") {
    profiles::RiemannStep p;
    in.get("init.x0", p.x0);
    in.get("init.u_left", p.u_left);
    in.get("init.u_right", p.u_right);
    in.get("init.width", p.width);
    if (p.width < 0.0) throw ConfigError("config key 'init.width': must be >= 0");
    return p;
  }
  if (profile == "zero") return profiles::SampleTable{};
  if (profile == "table") {
    const auto file = in.path("init.table");
    if (!file) throw ConfigError("init.profile = table requires init.table");
    Table t = read_table(*file, 2);
    for (std::size_t k = 1; k < t.columns[0].size(); ++k)
      if (!(t.columns[0][k] > t.columns[0][k - 1]))
        throw ConfigError("init.table: x column must be strictly increasing");
    return profiles::SampleTable{t.columns[0], t.columns[1]};
  }
  throw ConfigError("config key 'init.profile': unknown profile '" + profile + "'");
}

}  // namespace

Table read_table(const std::filesystem::path& path, std::size_t columns) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open table " + path.string());
  Table t;
  t.columns.assign(columns, {});
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_list(line);
    if (t.header.empty()) {
      if (cells.size() != columns)
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected a header with " +
                          std::to_string(columns) + " columns");
      t.header = cells;
      continue;
    }
    if (cells.size() != columns)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                        " values");
    for (std::size_t c = 0; c < columns; ++c)
      t.columns[c].push_back(to_double(path.filename().string() + ":" + std::to_string(line_no), cells[c]));
  }
  if (t.columns[0].empty()) throw ConfigError("table " + path.string() + " has no rows");
  return t;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream stream(text);
  try {
    pt::ini_parser::read_ini(stream, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config syntax error at line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config key '" + section + "' appears outside a [section]");
    for (const auto& [key, value] : body) {
      const std::string flat = section + "." + key;
      if (!known_keys().contains(flat)) throw ConfigError("unknown config key '" + flat + "'");
      cfg.entries[flat] = trim(value.data());
    }
  }

  const Reader in(cfg.entries, base_dir);

  std::string family = "weighted-burgers";
  in.get("flux.family", family);
  try {
    cfg.flux.family = parse_flux_family(family);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config key 'flux.family': ") + e.what());
  }
  in.get("flux.a", cfg.flux.a);
  in.get("flux.s", cfg.flux.s);
  in.get("flux.state_box_m", cfg.flux.state_box_m);
  if (cfg.flux.family == FluxFamily::custom_table) {
    const auto file = in.path("flux.table");
    if (!file) throw ConfigError("flux.family = custom-table requires flux.table");
    Table t = read_table(*file, 2);
    cfg.flux.table_x = t.columns[0];
    cfg.flux.table_b = t.columns[1];
  }

  cfg.profile = "gaussian-dipole";
  in.get("init.profile", cfg.profile);
  cfg.init = read_profile(in, cfg.profile);
  in.get("init.enforce_zero_mean", cfg.enforce_zero_mean);
  if (in.raw("init.mollify")) {
    double delta = 0.0;
    in.get("init.mollify", delta);
    cfg.mollify = delta;
  }

  in.get("grid.x_max", cfg.x_max);
  in.get("grid.n", cfg.n);
  in.get("grid.override", cfg.grid_override);
  if (!(cfg.x_max > 0.0) || cfg.n < 4) throw ConfigError("grid: need grid.x_max > 0 and grid.n >= 4");

  in.get("solver.epsilon", cfg.solver.epsilon);
  std::string kind = "engquist-osher";
  std::string integrator = "ssp-rk2";
  in.get("solver.flux_kind", kind);
  in.get("solver.integrator", integrator);
  try {
    cfg.solver.numerical_flux = parse_numerical_flux(kind);
    cfg.solver.integrator = parse_integrator(integrator);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  in.get("solver.cfl", cfg.solver.cfl);
  in.get("solver.t_end", cfg.solver.t_end);
  in.get("solver.output_stride", cfg.solver.output_stride);
  in.get("solver.nonlocal_source", cfg.solver.nonlocal_source);
  try {
    check_config(cfg.solver);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  std::string dir;
  in.get("output.dir", dir);
  if (!dir.empty()) cfg.out_dir = dir;
  in.get("output.dump_primitive", cfg.dump_primitive);
  in.get("output.stride", cfg.output_stride);
  if (cfg.output_stride < 1) throw ConfigError("config key 'output.stride': must be >= 1");

  if (const auto* r = in.raw("sweep.eps_list"))
    for (const auto& item : split_list(*r)) cfg.eps_list.push_back(to_double("sweep.eps_list", item));

  in.get("stability.R", cfg.stability_r);
  cfg.stability_seed = in.seed("stability.seed_v");
  in.get("stability.amplitude", cfg.stability_amplitude);

  in.get("entropy.c_quantiles", cfg.c_quantiles);
  in.get("entropy.n_testfns", cfg.n_testfns);
  cfg.entropy_seed = in.seed("entropy.seed");
  if (cfg.c_quantiles < 1 || cfg.n_testfns < 1)
    throw ConfigError("entropy: need entropy.c_quantiles >= 1 and entropy.n_testfns >= 1");

  if (const auto* r = in.raw("converge.n_list"))
    for (const auto& item : split_list(*r)) cfg.n_list.push_back(to_integer<int>("converge.n_list", item));
  in.get("converge.min_order", cfg.min_order);

  cfg.import = in.path("certify.import");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << file.rdbuf();
  RunConfig cfg = parse_config(buffer.str(), path.parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace ohx::cli
