#include "ohx/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ohx/error.hpp"
#include "ohx/nonlocal.hpp"
#include "ohx/quadrature.hpp"
#include "ohx/random.hpp"

namespace ohx {
namespace {

constexpr double kTimeGap = 0.02;
constexpr double kBumpMax = 0.36787944117144233;  // exp(-1)

double bump_slope_max() {
  static const double value = [] {
    double best = 0.0;
    for (int k = 1; k < 20000; ++k) best = std::max(best, std::abs(bump_derivative(k / 20000.0)));
    return best;
  }();
  return value;
}

std::vector<double> trapezoid_weights(const RunHistory& h) {
  const std::size_t m = h.snapshots.size();
  std::vector<double> w(m, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double half = 0.5 * (h.snapshots[k + 1].time() - h.snapshots[k].time());
    w[k] += half;
    w[k + 1] += half;
  }
  return w;
}

/// int int g(x, u, P, phi, phi_x, phi_t) dx dt over the support of phi.
template <class Integrand>
double space_time(const RunHistory& h, const TestFunction& phi, Integrand&& g) {
  const Grid& grid = h.grid;
  const double dx = grid.dx();
  const Interval xs = phi.x_support();
  const Interval ts = phi.t_support();
  const int i_lo = std::max(0, static_cast<int>(std::floor(xs.lo / dx)));
  const int i_hi = std::min(grid.n() - 1, static_cast<int>(std::ceil(xs.hi / dx)));
  const std::vector<double> w = trapezoid_weights(h);

  double total = 0.0;
  for (std::size_t k = 0; k < h.snapshots.size(); ++k) {
    const Snapshot& s = h.snapshots[k];
    const double t = s.time();
    if (t <= ts.lo || t >= ts.hi || w[k] == 0.0) continue;
    double row = 0.0;
    for (int i = i_lo; i <= i_hi; ++i) {
      const double x = grid.center(i);
      const auto ii = static_cast<std::size_t>(i);
      row += g(x, s.u.values[ii], s.p.values[ii], phi.value(x, t), phi.dx(x, t), phi.dt(x, t));
    }
    total += w[k] * dx * row;
  }
  return total;
}

void require_history(const RunHistory& h, const char* who) {
  if (h.snapshots.empty()) throw InvalidArgument(std::string(who) + ": empty history");
}

}  // namespace

double TestFunction::value(double x, double t) const noexcept {
  return scale * bump((x - x0) / rx) * bump((t - t0) / rt);
}

double TestFunction::dx(double x, double t) const noexcept {
  return scale * bump_derivative((x - x0) / rx) / rx * bump((t - t0) / rt);
}

double TestFunction::dt(double x, double t) const noexcept {
  return scale * bump((x - x0) / rx) * bump_derivative((t - t0) / rt) / rt;
}

double TestFunction::c1_norm() const noexcept {
  const double slope = bump_slope_max();
  return std::abs(scale) * (kBumpMax * kBumpMax + kBumpMax * slope / rx + kBumpMax * slope / rt);
}

void check_interior(const TestFunction& phi, const Grid& grid, double t_end) {
  if (!(phi.rx > 0.0) || !(phi.rt > 0.0)) throw InvalidArgument("test function: radii must be positive");
  const double gap = 2.0 * grid.dx();
  const double t_gap = kTimeGap * t_end;
  const Interval xs = phi.x_support();
  const Interval ts = phi.t_support();
  if (xs.lo < gap || xs.hi > grid.x_max() - gap || ts.lo < t_gap || ts.hi > t_end - t_gap)
    throw InvalidArgument("test function support [" + std::to_string(xs.lo) + ", " + std::to_string(xs.hi) +
                          "] x [" + std::to_string(ts.lo) + ", " + std::to_string(ts.hi) +
                          "] is not interior to the space-time domain");
}

std::vector<TestFunction> random_test_functions(const Grid& grid, double t_end, Interval x_window, int count,
                                                std::uint64_t seed) {
  const double gap = 2.0 * grid.dx();
  const double lo = std::max(x_window.lo, gap);
  const double hi = std::min(x_window.hi, grid.x_max() - gap);
  const double t_gap = kTimeGap * t_end;
  const double t_room = 0.5 * (t_end - 2.0 * t_gap);
  if (!(hi - lo > 2.0 * gap) || !(t_room > 0.0))
    throw InvalidArgument("random_test_functions: window too small for interior test functions");

  CounterRng rng(seed, /*stream=*/2);
  std::vector<TestFunction> out;
  for (int k = 0; k < count; ++k) {
    TestFunction phi;
    phi.rx = std::min(rng.uniform(0.25, 1.5), 0.499 * (hi - lo));
    phi.x0 = rng.uniform(lo + phi.rx, hi - phi.rx);
    phi.rt = std::min(rng.uniform(0.1, 0.4) * t_end, 0.999 * t_room);
    phi.t0 = rng.uniform(t_gap + phi.rt, t_end - t_gap - phi.rt);
    out.push_back(phi);
  }
  return out;
}

double l2_norm(std::span<const double> u, double dx) {
  double sq = 0.0;
  for (double v : u) sq += v * v;
  return std::sqrt(dx * sq);
}

double l2_norm(const Field& u) { return l2_norm(u.values, u.grid.dx()); }

EstimateReport gronwall_energy_check(const RunHistory& history, double c_hat, double tol) {
  require_history(history, "gronwall_energy_check");
  if (!(c_hat >= 0.0)) throw InvalidArgument("gronwall_energy_check: C_hat must be >= 0");

  EstimateReport r;
  r.name = "gronwall";
  r.tolerance = tol;
  r.pass = true;
  r.margin = std::numeric_limits<double>::infinity();
  const double base = l2_norm(history.initial().u);
  for (const Snapshot& s : history.snapshots) {
    const double lhs = l2_norm(s.u);
    const double rhs = std::exp(c_hat * s.time()) * base;
    const double margin = rhs * (1.0 + tol) - lhs;
    r.trend.push_back(lhs);
    if (margin < r.margin) {
      r.margin = margin;
      r.lhs = lhs;
      r.rhs = rhs;
    }
    if (margin < 0.0) r.pass = false;
  }
  r.extras = {{"C_hat", c_hat}, {"t_final", history.final().time()}};
  return r;
}

EstimateReport energy_balance_residual(const RunHistory& history, const FluxModel& model, double epsilon,
                                       double tol) {
  require_history(history, "energy_balance_residual");
  if (!(epsilon > 0.0)) throw InvalidArgument("energy_balance_residual: the energy equality needs epsilon > 0");
  const double t_end = history.config.t_end;
  for (std::size_t k = 0; k + 1 < history.snapshots.size(); ++k)
    if (history.snapshots[k + 1].time() - history.snapshots[k].time() > 0.01 * t_end * (1.0 + 1e-12))
      throw InvalidArgument("energy_balance_residual: snapshots must be spaced at most 0.01 * t_end apart");

  const Grid& grid = history.grid;
  const double dx = grid.dx();
  const int n = grid.n();

  auto energy_terms = [&](const Snapshot& s) {
    const auto& u = s.u.values;
    double grad = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double left = k == 0 ? -u[0] : u[static_cast<std::size_t>(k - 1)];
      const double right = k == n ? 0.0 : u[static_cast<std::size_t>(k)];
      const double d = (right - left) / dx;
      grad += d * d;
    }
    double source = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = grid.center(i);
      const double ui = u[static_cast<std::size_t>(i)];
      const double inner = integrate([&](double v) { return v * model.dxu(x, v); }, 0.0, ui, 4);
      source += inner - ui * model.dx(x, ui);
    }
    const double edge = mean(s.u);
    return std::array<double, 4>{l2_norm(s.u) * l2_norm(s.u), dx * grad, dx * source, edge * edge};
  };

  EstimateReport r;
  r.name = "energy-balance";
  r.tolerance = tol;
  std::array<double, 4> prev = energy_terms(history.initial());
  const double e0 = prev[0];
  double dissipation = 0.0;
  double production = 0.0;
  double mean_term = 0.0;
  double worst = -1.0;
  double worst_without_mean = 0.0;
  r.lhs = r.rhs = e0;
  r.trend.push_back(0.0);
  for (std::size_t k = 1; k < history.snapshots.size(); ++k) {
    const auto cur = energy_terms(history.snapshots[k]);
    const double h = history.snapshots[k].time() - history.snapshots[k - 1].time();
    dissipation += 0.5 * h * (prev[1] + cur[1]);
    production += 0.5 * h * (prev[2] + cur[2]);
    mean_term += 0.5 * h * (prev[3] + cur[3]);
    const double lhs = cur[0] + 2.0 * epsilon * dissipation;
    const double rhs = e0 + 2.0 * production + mean_term;
    const double residual = std::abs(lhs - rhs);
    worst_without_mean = std::max(worst_without_mean, std::abs(lhs - rhs + mean_term));
    r.trend.push_back(residual);
    if (residual > worst) {
      worst = residual;
      r.lhs = lhs;
      r.rhs = rhs;
    }
    prev = cur;
  }
  worst = std::max(worst, 0.0);
  r.margin = tol * std::abs(r.rhs) - worst;
  r.pass = worst <= tol * std::abs(r.rhs);
  r.extras = {{"residual", worst},
              {"mean_term", mean_term},
              {"residual_without_mean_term", worst_without_mean},
              {"epsilon", epsilon}};
  return r;
}

double weak_form_residual(const RunHistory& history, const FluxModel& model, const TestFunction& phi) {
  require_history(history, "weak_form_residual");
  check_interior(phi, history.grid, history.config.t_end);
  const double source = history.config.nonlocal_source ? 1.0 : 0.0;
  return space_time(history, phi, [&](double x, double u, double p, double f, double fx, double ft) {
    return u * ft + model.eval(x, u) * fx + source * p * f;
  });
}

double kruzkov_residual(const RunHistory& history, const FluxModel& model, double c, const TestFunction& phi) {
  require_history(history, "kruzkov_residual");
  check_interior(phi, history.grid, history.config.t_end);
  const double source = history.config.nonlocal_source ? 1.0 : 0.0;
  return space_time(history, phi, [&](double x, double u, double p, double f, double fx, double ft) {
    const double s = sign(u - c);
    return std::abs(u - c) * ft + s * (model.eval(x, u) - model.eval(x, c)) * fx - s * model.dx(x, c) * f +
           source * s * p * f;
  });
}

double entropy_tolerance(const TestFunction& phi, double dx, double kappa) {
  return kappa * dx * phi.c1_norm() * phi.support_measure();
}

std::vector<double> state_quantiles(const RunHistory& history, int count) {
  require_history(history, "state_quantiles");
  if (count < 1) throw InvalidArgument("state_quantiles: count must be >= 1");
  std::vector<double> all;
  for (const Snapshot& s : history.snapshots) all.insert(all.end(), s.u.values.begin(), s.u.values.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (int j = 1; j <= count; ++j) {
    const double pos = static_cast<double>(j) / (count + 1) * static_cast<double>(all.size() - 1);
    const auto k = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    out.push_back(k + 1 < all.size() ? (1.0 - frac) * all[k] + frac * all[k + 1] : all[k]);
  }
  return out;
}

EntropyCertificate certify_entropy(const RunHistory& history, const FluxModel& model,
                                   std::span<const double> c_values, std::span<const TestFunction> phis,
                                   double kappa) {
  EntropyCertificate cert;
  EstimateReport& r = cert.report;
  r.name = "kruzkov";
  r.rhs = 1.0;
  r.lhs = -std::numeric_limits<double>::infinity();
  const double dx = history.grid.dx();
  for (double c : c_values) {
    for (const TestFunction& phi : phis) {
      const double ratio = kruzkov_residual(history, model, c, phi) / entropy_tolerance(phi, dx, kappa);
      cert.normalized.push_back(ratio);
      r.lhs = std::max(r.lhs, -ratio);
    }
  }
  if (cert.normalized.empty()) throw InvalidArgument("certify_entropy: no (c, phi) pairs");
  r.margin = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs;
  r.trend = cert.normalized;
  r.extras = {{"kappa", kappa}, {"pairs", static_cast<double>(cert.normalized.size())}};
  return cert;
}

EstimateReport certify_weak_form(const RunHistory& history, const FluxModel& model,
                                 std::span<const TestFunction> phis, double kappa) {
  if (phis.empty()) throw InvalidArgument("certify_weak_form: no test functions");
  EstimateReport r;
  r.name = "weak-form";
  r.rhs = 1.0;
  const double dx = history.grid.dx();
  double worst_abs = 0.0;
  for (const TestFunction& phi : phis) {
    const double res = weak_form_residual(history, model, phi);
    const double ratio = std::abs(res) / entropy_tolerance(phi, dx, kappa);
    r.trend.push_back(res);
    r.lhs = std::max(r.lhs, ratio);
    worst_abs = std::max(worst_abs, std::abs(res));
  }
  r.margin = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs;
  r.extras = {{"max_abs_residual", worst_abs}, {"kappa", kappa}};
  return r;
}

FluxConstants constants_on_range(const FluxModel& model, const Grid& grid, double u_bound) {
  const double u = std::max(u_bound, 1e-12);
  const std::vector<double> xs = grid.centers();
  return validate_assumptions(model, xs, Interval{-u, u}).measured;
}

double state_bound(const RunHistory& history) {
  double m = 0.0;
  for (const Snapshot& s : history.snapshots)
    for (double v : s.u.values) m = std::max(m, std::abs(v));
  return m;
}

EstimateReport stability_check(const RunHistory& u, const RunHistory& v, double R, const FluxConstants& constants,
                               double slack) {
  require_history(u, "stability_check");
  require_history(v, "stability_check");
  if (!(u.grid == v.grid)) throw InvalidArgument("stability_check: runs live on different grids");
  if (u.flux_name != v.flux_name) throw InvalidArgument("stability_check: runs use different fluxes");
  if (u.config.t_end != v.config.t_end || u.config.epsilon != v.config.epsilon)
    throw InvalidArgument("stability_check: runs use different solver configurations");
  if (u.snapshots.size() != v.snapshots.size())
    throw InvalidArgument("stability_check: runs have different snapshot counts");
  for (std::size_t k = 0; k < u.snapshots.size(); ++k)
    if (u.snapshots[k].time() != v.snapshots[k].time())
      throw InvalidArgument("stability_check: snapshot times differ");

  const double T = u.config.t_end;
  const double L = constants.L;
  const double L1 = constants.L1;
  const Grid& grid = u.grid;
  if (!(R > 0.0)) throw InvalidArgument("stability_check: R must be positive");
  if (R + L * T > grid.x_max())
    throw InvalidArgument("stability_check: R + L T = " + std::to_string(R + L * T) + " exceeds x_max = " +
                          std::to_string(grid.x_max()));

  auto cone_l1 = [&](const Field& a, const Field& b, double radius) {
    double sum = 0.0;
    for (int i = 0; i < grid.n() && grid.center(i) < radius; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      sum += std::abs(a.values[ii] - b.values[ii]);
    }
    return grid.dx() * sum;
  };

  EstimateReport r;
  r.name = "stability";
  r.tolerance = slack;
  r.pass = true;
  r.margin = std::numeric_limits<double>::infinity();
  const Field& u0 = u.initial().u;
  const Field& v0 = v.initial().u;
  for (std::size_t k = 0; k < u.snapshots.size(); ++k) {
    const double t = u.snapshots[k].time();
    const double lhs = cone_l1(u.snapshots[k].u, v.snapshots[k].u, R);
    const double rhs = std::exp((R + 0.5 * L * T) * t + L1 * T) * cone_l1(u0, v0, R + L * t);
    const double margin = rhs * (1.0 + slack) - lhs;
    r.trend.push_back(rhs > 0.0 ? lhs / rhs : 0.0);
    if (margin < r.margin) {
      r.margin = margin;
      r.lhs = lhs;
      r.rhs = rhs;
    }
    if (margin < 0.0) r.pass = false;
  }
  r.extras = {{"R", R}, {"L", L}, {"L1", L1}, {"T", T}};
  return r;
}

ConvergenceStudy self_convergence(std::span<const Field> finals) {
  if (finals.size() < 3) throw InvalidArgument("self_convergence: need at least 3 resolutions");
  ConvergenceStudy study;
  for (std::size_t k = 0; k < finals.size(); ++k) {
    study.levels.push_back(finals[k].grid.n());
    if (k > 0 && (finals[k].grid.n() != 2 * finals[k - 1].grid.n() ||
                  finals[k].grid.x_max() != finals[k - 1].grid.x_max()))
      throw InvalidArgument("self_convergence: grids do not nest (n must double at fixed x_max)");
  }
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    const double d = l1_distance(restrict_by_averaging(finals[k + 1]), finals[k]);
    if (!(d > 0.0)) throw Error("self_convergence: zero difference between levels; order undefined");
    study.differences.push_back(d);
  }
  study.orders = observed_orders(study.differences);
  return study;
}

double self_convergence_order(std::span<const RunHistory> runs) {
  std::vector<Field> finals;
  for (const RunHistory& h : runs) finals.push_back(h.final().u);
  return self_convergence(finals).order();
}

std::vector<double> observed_orders(std::span<const double> errors) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) out.push_back(std::log2(errors[k] / errors[k + 1]));
  return out;
}

}  // namespace ohx
