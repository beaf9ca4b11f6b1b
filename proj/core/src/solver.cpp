#include "ohx/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <string>

namespace ohx {
namespace {

constexpr int kSonicPanels = 64;
constexpr int kBisectionSteps = 80;
constexpr double kSpeedFloor = 1e-12;
constexpr double kBlowUpFactor = 10.0;
constexpr int kRightEdgeCells = 5;
constexpr double kRightEdgeActivity = 1e-3;

/// int_a^b of the positive (sign > 0) or negative part of f_u, oriented a -> b.
/// Between consecutive sonic points f_u keeps one sign, so each piece is
/// either f(q) - f(p) or zero.
double signed_part(const FluxModel& model, double x, double a, double b, std::span<const double> sonic,
                   bool positive) {
  if (a == b) return 0.0;
  std::vector<double> cuts{a};
  for (double s : sonic)
    if ((s > a && s < b) || (s < a && s > b)) cuts.push_back(s);
  cuts.push_back(b);
  if (a < b)
    std::sort(cuts.begin(), cuts.end());
  else
    std::sort(cuts.begin(), cuts.end(), std::greater<>());

  double total = 0.0;
  double f_prev = model.eval(x, cuts.front());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double f_next = model.eval(x, cuts[k + 1]);
    const double speed = model.du(x, 0.5 * (cuts[k] + cuts[k + 1]));
    if (positive ? speed > 0.0 : speed < 0.0) total += f_next - f_prev;
    f_prev = f_next;
  }
  return total;
}

double engquist_osher(const FluxModel& model, double x, double ul, double ur) {
  const double lo = std::min({0.0, ul, ur});
  const double hi = std::max({0.0, ul, ur});
  const std::vector<double> sonic = sonic_points(model, x, lo, hi);
  return model.eval(x, 0.0) + signed_part(model, x, 0.0, ul, sonic, true) +
         signed_part(model, x, 0.0, ur, sonic, false);
}

double rusanov(const FluxModel& model, double x, double ul, double ur) {
  const double alpha = std::max(std::abs(model.du(x, ul)), std::abs(model.du(x, ur)));
  return 0.5 * (model.eval(x, ul) + model.eval(x, ur)) - 0.5 * alpha * (ur - ul);
}

Interval monitor_window(const Grid& grid, const SolverConfig& config) {
  return config.monitor_window.value_or(Interval{0.0, grid.x_max()});
}

StepDiagnostics diagnose(const Field& u, const Primitive& p, double dt, Interval window) {
  StepDiagnostics d;
  d.time = u.time;
  d.dt = dt;
  d.mean = mean(u);
  double sq = 0.0;
  for (double v : u.values) sq += v * v;
  d.l2 = std::sqrt(u.grid.dx() * sq);
  d.sup_u = sup_local(u.grid, u.values, window);
  d.sup_p = sup_local(p, window);
  return d;
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

NumericalFlux parse_numerical_flux(std::string_view name) {
  if (name == "rusanov") return NumericalFlux::rusanov;
  if (name == "engquist-osher" || name == "eo") return NumericalFlux::engquist_osher;
  throw InvalidArgument("unknown numerical flux '" + std::string(name) + "'");
}

Integrator parse_integrator(std::string_view name) {
  if (name == "ssp-rk2") return Integrator::ssp_rk2;
  if (name == "ssp-rk3") return Integrator::ssp_rk3;
  throw InvalidArgument("unknown integrator '" + std::string(name) + "'");
}

std::string_view to_string(NumericalFlux kind) {
  return kind == NumericalFlux::rusanov ? "rusanov" : "engquist-osher";
}

std::string_view to_string(Integrator kind) { return kind == Integrator::ssp_rk2 ? "ssp-rk2" : "ssp-rk3"; }

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::non_finite: return "non-finite";
    case FaultKind::blow_up: return "blow-up";
    case FaultKind::box_exit: return "box-exit";
  }
  return "unknown";
}

void check_config(const SolverConfig& config) {
  if (!(config.cfl > 0.0 && config.cfl <= 1.0)) throw InvalidArgument("solver: cfl must lie in (0, 1]");
  if (!(config.epsilon >= 0.0) || !std::isfinite(config.epsilon))
    throw InvalidArgument("solver: epsilon must be >= 0");
  if (!(config.t_end > 0.0) || !std::isfinite(config.t_end)) throw InvalidArgument("solver: t_end must be > 0");
  if (config.output_stride < 1) throw InvalidArgument("solver: output_stride must be >= 1");
}

std::vector<double> sonic_points(const FluxModel& model, double x, double lo, double hi) {
  if (!(hi > lo)) return {};
  if (model.sonic_points) return model.sonic_points(x, lo, hi);

  std::vector<double> roots;
  const double h = (hi - lo) / kSonicPanels;
  double a = lo;
  double fa = model.du(x, a);
  for (int k = 1; k <= kSonicPanels; ++k) {
    const double b = k == kSonicPanels ? hi : lo + k * h;
    const double fb = model.du(x, b);
    if (fa == 0.0 && a > lo) {
      roots.push_back(a);
    } else if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      double left = a;
      double right = b;
      double f_left = fa;
      for (int it = 0; it < kBisectionSteps; ++it) {
        const double mid = 0.5 * (left + right);
        const double fm = model.du(x, mid);
        if (fm == 0.0) {
          left = right = mid;
          break;
        }
        if ((fm < 0.0) == (f_left < 0.0)) {
          left = mid;
          f_left = fm;
        } else {
          right = mid;
        }
      }
      roots.push_back(0.5 * (left + right));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

double numerical_flux_value(const FluxModel& model, double x_iface, double u_left, double u_right,
                            NumericalFlux kind) {
  if (!std::isfinite(u_left) || !std::isfinite(u_right))
    throw Error("numerical_flux_value: non-finite interface state");
  return kind == NumericalFlux::rusanov ? rusanov(model, x_iface, u_left, u_right)
                                        : engquist_osher(model, x_iface, u_left, u_right);
}

RhsEvaluator::RhsEvaluator(const Grid& grid, const FluxModel& model, double epsilon, NumericalFlux kind,
                           bool nonlocal_source)
    : grid_(grid),
      model_(&model),
      epsilon_(epsilon),
      kind_(kind),
      source_(nonlocal_source),
      primitive_(static_cast<std::size_t>(grid.n()), 0.0),
      face_flux_(static_cast<std::size_t>(grid.n() + 1), 0.0) {}

void RhsEvaluator::operator()(std::span<const double> u, std::span<double> tendency) {
  const int n = grid_.n();
  const double dx = grid_.dx();
  const double m = model_->state_box_m;

  for (int i = 0; i < n; ++i) {
    const double v = u[static_cast<std::size_t>(i)];
    if (!std::isfinite(v)) throw Error("semi_discrete_rhs: non-finite state");
    if (std::abs(v) > m)
      throw SolverFault(FaultKind::box_exit, "state |u| = " + std::to_string(std::abs(v)) + " at x = " +
                                                 std::to_string(grid_.center(i)) +
                                                 " left the flux validation box [-M, M] with M = " +
                                                 std::to_string(m) + "; enlarge flux.state_box_m");
  }

  // Interface 0 sits on x = 0 with the Dirichlet boundary state; interface n
  // sees the zero extension.
  for (int k = 0; k <= n; ++k) {
    const double ul = k == 0 ? 0.0 : u[static_cast<std::size_t>(k - 1)];
    const double ur = k == n ? 0.0 : u[static_cast<std::size_t>(k)];
    face_flux_[static_cast<std::size_t>(k)] = numerical_flux_value(*model_, grid_.interface(k), ul, ur, kind_);
  }

  if (source_)
    cumulative_primitive(u, dx, primitive_);
  else
    std::fill(primitive_.begin(), primitive_.end(), 0.0);

  const double diff = epsilon_ / (dx * dx);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    double value = -(face_flux_[k + 1] - face_flux_[k]) / dx + primitive_[k];
    if (epsilon_ > 0.0) {
      const double left = i == 0 ? -u[0] : u[k - 1];
      const double right = i == n - 1 ? 0.0 : u[k + 1];
      value += diff * (right - 2.0 * u[k] + left);
    }
    tendency[k] = value;
  }
}

Field semi_discrete_rhs(const Field& u, const FluxModel& model, double epsilon, NumericalFlux kind,
                        bool nonlocal_source) {
  RhsEvaluator rhs(u.grid, model, epsilon, kind, nonlocal_source);
  Field out = Field::zeros(u.grid, u.time);
  rhs(u.values, out.values);
  return out;
}

double stable_dt(const Field& u, const FluxModel& model, const SolverConfig& config) {
  const Grid& grid = u.grid;
  const double dx = grid.dx();
  double alpha = kSpeedFloor;
  for (int i = 0; i < grid.n(); ++i)
    alpha = std::max(alpha, std::abs(model.du(grid.center(i), u.values[static_cast<std::size_t>(i)])));

  double cap = dx / alpha;
  if (config.epsilon > 0.0) cap = std::min(cap, dx * dx / (2.0 * config.epsilon));
  if (config.nonlocal_source) cap = std::min(cap, 1.0 / (grid.x_max() + 1.0));
  return config.cfl * cap;
}

RunHistory solve(const Field& u0, const FluxModel& model, const SolverConfig& config) {
  check_config(config);
  check_field(u0);

  const Grid& grid = u0.grid;
  const auto n = static_cast<std::size_t>(grid.n());
  const Interval window = monitor_window(grid, config);

  auto history = std::make_shared<RunHistory>();
  history->grid = grid;
  history->flux_name = model.name;
  history->config = config;

  double l1 = 0.0;
  for (double v : u0.values) l1 += std::abs(v);
  if (std::abs(mean(u0)) > 1e-10 * (1.0 + grid.dx() * l1))
    history->warnings.push_back("initial data does not have zero mean: mean = " + std::to_string(mean(u0)));

  Field u = u0;
  u.time = 0.0;
  history->snapshots.push_back({u, cumulative_primitive(u)});

  RhsEvaluator rhs(grid, model, config.epsilon, config.numerical_flux, config.nonlocal_source);
  std::vector<double> k1(n), stage(n), k2(n), stage2(n);

  auto fault = [&](FaultKind kind, const std::string& message) {
    return SolverFault(kind, message + " at t = " + std::to_string(u.time),
                       std::shared_ptr<const RunHistory>(history));
  };

  const double blow_up = kBlowUpFactor * model.state_box_m;
  bool edge_warned = false;
  long step = 0;
  while (u.time < config.t_end) {
    double dt = stable_dt(u, model, config);
    bool last = false;
    if (u.time + dt >= config.t_end * (1.0 - 1e-14)) {
      dt = config.t_end - u.time;
      last = true;
    }

    try {
      rhs(u.values, k1);
      for (std::size_t i = 0; i < n; ++i) stage[i] = u.values[i] + dt * k1[i];
      rhs(stage, k2);
      if (config.integrator == Integrator::ssp_rk2) {
        for (std::size_t i = 0; i < n; ++i) stage[i] = 0.5 * (u.values[i] + stage[i] + dt * k2[i]);
      } else {
        for (std::size_t i = 0; i < n; ++i) stage2[i] = 0.75 * u.values[i] + 0.25 * (stage[i] + dt * k2[i]);
        rhs(stage2, k2);
        for (std::size_t i = 0; i < n; ++i)
          stage[i] = u.values[i] / 3.0 + 2.0 / 3.0 * (stage2[i] + dt * k2[i]);
      }
    } catch (const SolverFault& f) {
      throw fault(f.kind(), f.what());
    } catch (const Error& e) {
      throw fault(FaultKind::non_finite, e.what());
    }

    bool finite = true;
    for (double v : stage) finite = finite && std::isfinite(v);
    if (!finite) throw fault(FaultKind::non_finite, "state became non-finite");
    const double sup = sup_abs(stage);
    if (sup > blow_up) throw fault(FaultKind::blow_up, "sup|u| = " + std::to_string(sup) + " exceeds 10 M");

    std::swap(u.values, stage);
    u.time = last ? config.t_end : u.time + dt;
    ++step;

    const Primitive p = cumulative_primitive(u);
    history->steps.push_back(diagnose(u, p, dt, window));

    if (!edge_warned && grid.n() > kRightEdgeCells && sup > 0.0) {
      const double edge = sup_abs(std::span<const double>(u.values).last(kRightEdgeCells));
      if (edge > kRightEdgeActivity * sup) {
        history->warnings.push_back("activity within 5 cells of x_max at t = " + std::to_string(u.time));
        edge_warned = true;
      }
    }

    if (last || step % config.output_stride == 0) history->snapshots.push_back({u, p});
    if (last) break;
  }
  return std::move(*history);
}

SweepReport viscosity_sweep(const Field& u0, const FluxModel& model, const SolverConfig& base,
                            std::span<const double> eps_list) {
  if (eps_list.empty()) throw InvalidArgument("viscosity_sweep: empty epsilon list");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] >= 0.0)) throw InvalidArgument("viscosity_sweep: epsilon must be >= 0");
    if (k > 0 && eps_list[k] > eps_list[k - 1])
      throw InvalidArgument("viscosity_sweep: epsilon list must be nonincreasing");
  }

  std::vector<std::future<RunHistory>> jobs;
  for (double eps : eps_list) {
    SolverConfig config = base;
    config.epsilon = eps;
    jobs.push_back(std::async(std::launch::async, [&u0, &model, config] { return solve(u0, model, config); }));
  }

  SweepReport report;
  report.eps.assign(eps_list.begin(), eps_list.end());
  for (auto& job : jobs) report.runs.push_back(job.get());

  for (std::size_t k = 0; k + 1 < report.runs.size(); ++k)
    report.successive.push_back(l1_distance(report.runs[k].final().u, report.runs[k + 1].final().u));

  if (report.eps.back() == 0.0 && report.runs.size() > 1) {
    const Field& inviscid = report.runs.back().final().u;
    for (std::size_t k = 0; k + 1 < report.runs.size(); ++k)
      if (report.eps[k] > 0.0) report.to_inviscid.push_back(l1_distance(report.runs[k].final().u, inviscid));
  }
  return report;
}

}  // namespace ohx
