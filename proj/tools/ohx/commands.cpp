#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <ohx/analysis.hpp>
#include <ohx/nonlocal.hpp>

#include "config.hpp"
#include "output.hpp"

namespace ohx::cli {
namespace {

struct Outcome {
  std::optional<RunHistory> history;
  std::optional<std::string> fault;
};

Outcome solve_capturing(const Field& u0, const FluxModel& model, const SolverConfig& config) {
  Outcome out;
  try {
    out.history = solve(u0, model, config);
  } catch (const SolverFault& f) {
    out.fault = std::string(to_string(f.kind())) + ": " + f.what();
    if (f.partial()) out.history = *f.partial();
  }
  return out;
}

Field initial_field(const RunConfig& cfg, const Grid& grid) {
  Field u0 = project_initial(cfg.init, grid, cfg.enforce_zero_mean);
  if (cfg.mollify) u0 = mollify_initial(u0, *cfg.mollify);
  return u0;
}

double sup_abs(const Field& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

/// Truncation-length rule, speed measured on the initial state range.
void check_domain(const RunConfig& cfg, const FluxModel& model, const Field& u0, std::ostream& log) {
  const double speed = constants_on_range(model, u0.grid, sup_abs(u0)).L;
  const double need = required_domain_length(support_radius(u0), speed, cfg.solver.t_end);
  if (cfg.x_max >= need) return;
  const std::string msg = fmt::format("grid.x_max = {} is below the required truncation length {:.6g} "
                                      "(1.2 * (support + L T))",
                                      cfg.x_max, need);
  if (!cfg.grid_override) throw ConfigError(msg + "; set grid.override = true to proceed");
  fmt::print(log, "warning: {} (overridden)\n", msg);
}

ValidationReport validate_on_grid(const FluxModel& model, const Grid& grid) {
  const std::vector<double> xs = grid.centers();
  const double m = model.state_box_m;
  return validate_assumptions(model, xs, Interval{-m, m});
}

void print_report(std::ostream& log, const EstimateReport& r) {
  fmt::print(log, "  {:<16} {:<4} lhs={:<13.6g} rhs={:<13.6g} margin={:.6g}\n", r.name, r.pass ? "PASS" : "FAIL", r.lhs,
             r.rhs, r.margin);
}

EstimateReport precondition_failure(const std::string& name, const std::string& why) {
  EstimateReport r;
  r.name = name;
  r.pass = false;
  r.detail = "precondition: " + why;
  return r;
}

nlohmann::json run_summary(const RunHistory& h, const std::optional<std::string>& fault) {
  const Primitive& p0 = h.initial().p;
  double p_sum = 0.0;
  double p_sq = 0.0;
  for (double v : p0.values) {
    p_sum += v;
    p_sq += v * v;
  }
  double max_mean = 0.0;
  double max_sup_u = 0.0;
  double max_sup_p = 0.0;
  for (const auto& s : h.steps) {
    max_mean = std::max(max_mean, std::abs(s.mean));
    max_sup_u = std::max(max_sup_u, s.sup_u);
    max_sup_p = std::max(max_sup_p, s.sup_p);
  }
  return {{"name", "run"},
          {"flux", h.flux_name},
          {"steps", h.steps.size()},
          {"snapshots", h.snapshots.size()},
          {"t_final", h.final().time()},
          {"completed", !fault.has_value()},
          {"fault", fault ? *fault : ""},
          {"initial_primitive_sum", h.grid.dx() * p_sum},
          {"initial_primitive_square_sum", h.grid.dx() * p_sq},
          {"max_abs_mean", max_mean},
          {"max_sup_u", max_sup_u},
          {"max_sup_p", max_sup_p},
          {"final_l2", l2_norm(h.final().u)},
          {"warnings", h.warnings}};
}

int cmd_validate_flux(const RunConfig& cfg, Manifest& manifest, std::ostream& log) {
  const FluxModel model = make_flux(cfg.flux);
  const Grid grid = make_grid(cfg.x_max, cfg.n);
  const ValidationReport report = validate_on_grid(model, grid);
  manifest.set_constants(report.effective, model.state_box_m);
  manifest.emit("report_validate-flux.json", to_json(report).dump(2) + "\n");

  fmt::print(log, "validate-flux: {} on x in [{:g}, {:g}], u in [-{:g}, {:g}]\n", model.name, grid.center(0),
             grid.center(grid.n() - 1), model.state_box_m, model.state_box_m);
  for (const auto& c : report.checks)
    fmt::print(log, "  {:<28} {:<4} {}\n", c.name, c.pass ? "PASS" : (c.warn_only ? "WARN" : "FAIL"), c.detail);
  return report.passed() ? exit_ok : exit_check_failed;
}

int cmd_run(const RunConfig& cfg, Manifest& manifest, std::ostream& log) {
  const FluxModel model = make_flux(cfg.flux);
  const Grid grid = make_grid(cfg.x_max, cfg.n);
  const Field u0 = initial_field(cfg, grid);
  check_domain(cfg, model, u0, log);
  manifest.set_constants(validate_on_grid(model, grid).effective, model.state_box_m);

  const Outcome out = solve_capturing(u0, model, cfg.solver);
  const RunHistory& h = *out.history;
  for (const auto& w : h.warnings) manifest.warn(w);
  manifest.emit("snapshots.csv", snapshots_csv(h, cfg.dump_primitive, cfg.output_stride));
  manifest.emit("report_run.json", run_summary(h, out.fault).dump(2) + "\n");

  fmt::print(log, "run: {} steps, t = {:.6g}, ||u||_2 = {:.6g}\n", h.steps.size(), h.final().time(),
             l2_norm(h.final().u));
  if (out.fault) {
    fmt::print(log, "fault: {}\n", *out.fault);
    manifest.warn(*out.fault);
    return exit_fault;
  }
  return exit_ok;
}

struct Battery {
  std::vector<EstimateReport> reports;
  bool precondition_failed = false;
};

template <class F>
void attempt(Battery& b, const std::string& name, F&& check) {
  try {
    b.reports.push_back(check());
  } catch (const InvalidArgument& e) {
    b.reports.push_back(precondition_failure(name, e.what()));
    b.precondition_failed = true;
  }
}

void single_run_checks(Battery& b, const RunConfig& cfg, const RunHistory& h, const FluxModel& model, double c_hat,
                       std::uint64_t entropy_seed) {
  attempt(b, "gronwall", [&] { return gronwall_energy_check(h, c_hat); });
  if (cfg.solver.epsilon > 0.0)
    attempt(b, "energy-balance", [&] { return energy_balance_residual(h, model, cfg.solver.epsilon); });

  std::vector<TestFunction> phis;
  try {
    phis = random_test_functions(h.grid, h.config.t_end, Interval{0.0, h.grid.x_max()}, cfg.n_testfns, entropy_seed);
  } catch (const InvalidArgument& e) {
    b.reports.push_back(precondition_failure("weak-form", e.what()));
    b.reports.push_back(precondition_failure("kruzkov", e.what()));
    b.precondition_failed = true;
    return;
  }
  attempt(b, "weak-form", [&] { return certify_weak_form(h, model, phis); });
  attempt(b, "kruzkov", [&] {
    const std::vector<double> cs = state_quantiles(h, cfg.c_quantiles);
    return certify_entropy(h, model, cs, phis).report;
  });
}

int cmd_certify(const RunConfig& cfg, Manifest& manifest, std::ostream& log) {
  const FluxModel model = make_flux(cfg.flux);
  if (!cfg.entropy_seed) throw ConfigError("certify requires an explicit entropy.seed");

  Battery battery;
  std::optional<std::string> fault;
  RunHistory main;

  if (cfg.import) {
    main = read_snapshots(*cfg.import);
    const double t_end = main.config.t_end;
    main.config = cfg.solver;
    main.config.t_end = t_end;
    main.flux_name = model.name;
    const ValidationReport v = validate_on_grid(model, main.grid);
    manifest.set_constants(v.effective, model.state_box_m);
    single_run_checks(battery, cfg, main, model, v.effective.C, *cfg.entropy_seed);
  } else {
    if (!cfg.stability_seed) throw ConfigError("certify requires an explicit stability.seed_v");
    const Grid grid = make_grid(cfg.x_max, cfg.n);
    const Field u0 = initial_field(cfg, grid);
    check_domain(cfg, model, u0, log);

    profiles::RandomZeroMean bump;
    bump.seed = *cfg.stability_seed;
    bump.amplitude = cfg.stability_amplitude;
    bump.hi = std::min(bump.hi, 0.5 * cfg.x_max);
    bump.lo = std::min(bump.lo, 0.5 * bump.hi);
    Field v0 = u0;
    const Field delta = project_initial(bump, grid, true);
    for (std::size_t i = 0; i < v0.values.size(); ++i) v0.values[i] += delta.values[i];

    const double l0 = constants_on_range(model, grid, std::max(sup_abs(u0), sup_abs(v0))).L;
    if (cfg.stability_r + l0 * cfg.solver.t_end > cfg.x_max)
      throw ConfigError(fmt::format("stability.R + L T = {:.6g} exceeds grid.x_max = {:g}",
                                    cfg.stability_r + l0 * cfg.solver.t_end, cfg.x_max));

    const ValidationReport v = validate_on_grid(model, grid);
    manifest.set_constants(v.effective, model.state_box_m);

    auto job_u = std::async(std::launch::async, [&] { return solve_capturing(u0, model, cfg.solver); });
    auto job_v = std::async(std::launch::async, [&] { return solve_capturing(v0, model, cfg.solver); });
    Outcome ou = job_u.get();
    Outcome ov = job_v.get();
    main = std::move(*ou.history);
    fault = ou.fault;
    for (const auto& w : main.warnings) manifest.warn(w);
    // Aborted runs are certified on the interval they reached.
    main.config.t_end = main.final().time();

    single_run_checks(battery, cfg, main, model, v.effective.C, *cfg.entropy_seed);
    if (fault || ov.fault) {
      battery.reports.push_back(precondition_failure(
          "stability", "solver fault in " + std::string(fault ? "main" : "partner") + " run: " +
                           (fault ? *fault : *ov.fault)));
    } else {
      attempt(battery, "stability", [&] {
        const double bound = std::max(state_bound(main), state_bound(*ov.history));
        return stability_check(main, *ov.history, cfg.stability_r, constants_on_range(model, grid, bound));
      });
    }
    manifest.emit("snapshots.csv", snapshots_csv(main, cfg.dump_primitive, cfg.output_stride));
  }

  bool all_pass = true;
  fmt::print(log, "certify: {} snapshots up to t = {:.6g}\n", main.snapshots.size(), main.final().time());
  for (const auto& r : battery.reports) {
    manifest.emit("report_" + r.name + ".json", to_json(r).dump(2) + "\n");
    print_report(log, r);
    if (!r.detail.empty()) fmt::print(log, "    {}\n", r.detail);
    all_pass = all_pass && r.pass;
  }
  if (fault) {
    fmt::print(log, "fault: {}\n", *fault);
    manifest.warn(*fault);
    return exit_fault;
  }
  if (battery.precondition_failed) return exit_config;
  return all_pass ? exit_ok : exit_check_failed;
}

int cmd_sweep(const RunConfig& cfg, Manifest& manifest, std::ostream& log) {
  if (cfg.eps_list.size() < 2) throw ConfigError("sweep needs at least two entries in sweep.eps_list");
  const FluxModel model = make_flux(cfg.flux);
  const Grid grid = make_grid(cfg.x_max, cfg.n);
  const Field u0 = initial_field(cfg, grid);
  check_domain(cfg, model, u0, log);
  manifest.set_constants(validate_on_grid(model, grid).effective, model.state_box_m);

  const SweepReport sweep = viscosity_sweep(u0, model, cfg.solver, cfg.eps_list);
  std::vector<double> levels(sweep.eps.begin(), sweep.eps.end() - 1);
  manifest.emit("trend_sweep.csv", trend_csv(levels, sweep.successive));
  if (!sweep.to_inviscid.empty()) {
    std::vector<double> viscous(sweep.eps.begin(), sweep.eps.begin() + static_cast<long>(sweep.to_inviscid.size()));
    manifest.emit("trend_sweep_inviscid.csv", trend_csv(viscous, sweep.to_inviscid));
  }

  bool monotone = true;
  fmt::print(log, "sweep: successive L1 distances at t = {:g}\n", cfg.solver.t_end);
  for (std::size_t k = 0; k < sweep.successive.size(); ++k) {
    fmt::print(log, "  eps {:<10g} -> {:<10g} {:.6g}\n", sweep.eps[k], sweep.eps[k + 1], sweep.successive[k]);
    if (k > 0 && !(sweep.successive[k] < sweep.successive[k - 1])) monotone = false;
  }
  return monotone ? exit_ok : exit_check_failed;
}

int cmd_converge(const RunConfig& cfg, Manifest& manifest, std::ostream& log) {
  if (cfg.n_list.size() < 3) throw ConfigError("converge needs at least three entries in converge.n_list");
  for (std::size_t k = 1; k < cfg.n_list.size(); ++k)
    if (cfg.n_list[k] != 2 * cfg.n_list[k - 1]) throw ConfigError("converge.n_list must double at every level");
  const FluxModel model = make_flux(cfg.flux);

  std::vector<Field> initial;
  for (int n : cfg.n_list) initial.push_back(initial_field(cfg, make_grid(cfg.x_max, n)));
  check_domain(cfg, model, initial.back(), log);
  manifest.set_constants(validate_on_grid(model, initial.back().grid).effective, model.state_box_m);

  std::vector<std::future<RunHistory>> jobs;
  for (const Field& u0 : initial)
    jobs.push_back(std::async(std::launch::async, [&model, &cfg, &u0] { return solve(u0, model, cfg.solver); }));
  std::vector<Field> finals;
  for (auto& job : jobs) finals.push_back(job.get().final().u);

  const ConvergenceStudy study = self_convergence(finals);
  std::vector<double> levels(study.levels.begin(), study.levels.end() - 1);
  std::vector<double> ratios{std::nan("")};
  ratios.insert(ratios.end(), study.orders.begin(), study.orders.end());
  manifest.emit("trend_converge.csv", trend_csv(levels, study.differences, &ratios));

  fmt::print(log, "converge: observed orders");
  for (double p : study.orders) fmt::print(log, " {:.4f}", p);
  fmt::print(log, " (required >= {:g})\n", cfg.min_order);
  return study.order() >= cfg.min_order ? exit_ok : exit_check_failed;
}

int dispatch(const std::string& command, const RunConfig& cfg, Manifest& manifest, std::ostream& log) {
  if (command == "validate-flux") return cmd_validate_flux(cfg, manifest, log);
  if (command == "run") return cmd_run(cfg, manifest, log);
  if (command == "certify") return cmd_certify(cfg, manifest, log);
  if (command == "sweep") return cmd_sweep(cfg, manifest, log);
  if (command == "converge") return cmd_converge(cfg, manifest, log);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

int run_command(const std::string& command, const std::filesystem::path& config,
                const std::optional<std::filesystem::path>& out_dir, std::ostream& log) {
  std::optional<RunConfig> cfg;
  std::optional<Manifest> manifest;
  int code = exit_ok;
  std::string status = "ok";
  try {
    cfg = load_config(config);
    if (out_dir) cfg->out_dir = *out_dir;
    manifest.emplace(command, &*cfg);
    code = dispatch(command, *cfg, *manifest, log);
    if (code == exit_check_failed) status = "check failed";
    if (code == exit_fault) status = "runtime fault";
    if (code == exit_config) status = "precondition failed";
  } catch (const ConfigError& e) {
    code = exit_config;
    status = e.what();
  } catch (const InvalidArgument& e) {
    code = exit_config;
    status = e.what();
  } catch (const SolverFault& e) {
    code = exit_fault;
    status = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    code = exit_fault;
    status = e.what();
  }
  if (code == exit_config || (code == exit_fault && status != "runtime fault"))
    fmt::print(log, "error: {}\n", status);

  try {
    if (!manifest && out_dir) {
      manifest.emplace(command, nullptr);
      manifest->set_dir(*out_dir);
    }
    if (manifest) {
      manifest->set_status(code, status);
      manifest->finish();
    }
  } catch (const std::exception& e) {
    fmt::print(log, "error: cannot write manifest: {}\n", e.what());
    if (code == exit_ok) code = exit_fault;
  }
  return code;
}

}  // namespace ohx::cli
