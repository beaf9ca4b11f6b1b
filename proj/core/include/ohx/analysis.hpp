#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ohx/flux.hpp"
#include "ohx/grid.hpp"
#include "ohx/solver.hpp"

namespace ohx {

/// Tensor bump phi(x, t) = scale * beta((x - x0) / rx) * beta((t - t0) / rt)
/// with beta the standard bump. Partials are analytic.
struct TestFunction {
  double x0 = 1.0;
  double t0 = 1.0;
  double rx = 0.5;
  double rt = 0.5;
  double scale = 1.0;

  double value(double x, double t) const noexcept;
  double dx(double x, double t) const noexcept;
  double dt(double x, double t) const noexcept;

  Interval x_support() const noexcept { return {x0 - rx, x0 + rx}; }
  Interval t_support() const noexcept { return {t0 - rt, t0 + rt}; }
  /// 4 rx rt.
  double support_measure() const noexcept { return 4.0 * rx * rt; }
  /// sup|phi| + sup|phi_x| + sup|phi_t|.
  double c1_norm() const noexcept;
};

/// Throws InvalidArgument unless the support keeps a distance of at least
/// 2 dx from x = 0 and x = x_max, and 0.02 t_end from t = 0 and t = t_end.
void check_interior(const TestFunction& phi, const Grid& grid, double t_end);

/// `count` interior test functions drawn from CounterRng(seed, stream 2):
/// per function rx in [0.25, 1.5] (capped to fit), x0 uniform in the
/// admissible part of `x_window`, rt in [0.1, 0.4] * t_end, t0 uniform.
std::vector<TestFunction> random_test_functions(const Grid& grid, double t_end, Interval x_window, int count,
                                                std::uint64_t seed);

struct EstimateReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs * (1 + tolerance) - lhs at the binding point; >= 0 iff pass for
  /// one-sided bounds.
  double margin = 0.0;
  bool pass = false;
  double tolerance = 0.0;
  std::vector<double> trend;
  /// Named auxiliary quantities (e.g. the mean term of the energy balance).
  std::vector<std::pair<std::string, double>> extras;
  std::string detail;
};

double l2_norm(const Field& u);
double l2_norm(std::span<const double> u, double dx);

/// ||u(t)|| <= exp(C_hat t) ||u(0)|| (1 + tol) at every snapshot. The trend
/// holds ||u(t)|| per snapshot. Throws InvalidArgument on an empty history
/// or negative C_hat.
EstimateReport gronwall_energy_check(const RunHistory& history, double c_hat, double tol = 0.05);

/// Energy equality of the viscous problem on (0, x_max),
///   ||u(t)||^2 + 2 eps int_0^t ||u_x||^2
///     = ||u0||^2 + 2 int_0^t int [int_0^u v f_xv dv - u f_x] dx ds
///       + int_0^t P(x_max)^2 ds,
/// with u_x from interface differences (ghosts included) and trapezoid in
/// time over snapshots. The last term vanishes for zero-mean solutions on
/// the half-line; extras report it as "mean_term" next to the residual
/// obtained without it. lhs / rhs are taken at the snapshot of largest
/// |lhs - rhs|; pass iff that residual is <= tol * rhs. The trend holds the
/// residual per snapshot.
/// Throws InvalidArgument for epsilon <= 0, an empty history, or snapshots
/// spaced wider than 0.01 * t_end.
EstimateReport energy_balance_residual(const RunHistory& history, const FluxModel& model, double epsilon,
                                       double tol = 0.05);

/// Space-time quadrature of int int (u phi_t + f(x, u) phi_x + P phi):
/// midpoint in x over cells, trapezoid in t over snapshots, phi analytic.
/// The P terms are dropped when the history was run with the source off.
/// Throws InvalidArgument if phi is not interior.
double weak_form_residual(const RunHistory& history, const FluxModel& model, const TestFunction& phi);

/// Same quadrature for the interior Kruzkov inequality
///   int int |u - c| phi_t + sign(u - c)(f(x, u) - f(x, c)) phi_x
///           - sign(u - c) f_x(x, c) phi + sign(u - c) P phi >= 0.
double kruzkov_residual(const RunHistory& history, const FluxModel& model, double c, const TestFunction& phi);

/// Frozen calibration constant of the entropy tolerance.
inline constexpr double kEntropyKappa = 0.6;

/// kappa * dx * ||phi||_C1 * measure(supp phi).
double entropy_tolerance(const TestFunction& phi, double dx, double kappa = kEntropyKappa);

/// Levels 0.1, 0.2, ..., 0.9 (for count = 9) of the empirical distribution
/// of all snapshot values, linearly interpolated.
std::vector<double> state_quantiles(const RunHistory& history, int count = 9);

struct EntropyCertificate {
  EstimateReport report;
  /// Residual / tolerance for every (c, phi) pair, c-major.
  std::vector<double> normalized;
};

/// kruzkov_residual >= -tol_entropy for every c and phi. lhs is the worst
/// -residual / tol, rhs is 1.
EntropyCertificate certify_entropy(const RunHistory& history, const FluxModel& model,
                                   std::span<const double> c_values, std::span<const TestFunction> phis,
                                   double kappa = kEntropyKappa);

/// Weak-form residuals over a family of test functions; lhs is the largest
/// |residual| and rhs the same tolerance scale as the entropy check.
EstimateReport certify_weak_form(const RunHistory& history, const FluxModel& model,
                                 std::span<const TestFunction> phis, double kappa = kEntropyKappa);

/// Constants (C, L, L1) measured on grid centers x [-u_bound, u_bound].
FluxConstants constants_on_range(const FluxModel& model, const Grid& grid, double u_bound);

/// Largest |u| over all snapshots.
double state_bound(const RunHistory& history);

/// L1 stability over the cone: at each common snapshot
///   dx sum_{x_i < R} |u_i - v_i|
///     <= exp((R + L T / 2) t + L1 T) dx sum_{x_i < R + L t} |u_i(0) - v_i(0)| (1 + slack).
/// Throws InvalidArgument when the runs differ in grid, flux or snapshot
/// times, or when R + L T > x_max.
EstimateReport stability_check(const RunHistory& u, const RunHistory& v, double R, const FluxConstants& constants,
                               double slack = 0.1);

struct ConvergenceStudy {
  std::vector<int> levels;
  /// L1 distance at t_end between level k + 1 restricted to level k and level k.
  std::vector<double> differences;
  /// log2(differences[k] / differences[k + 1]).
  std::vector<double> orders;

  double order() const { return orders.back(); }
};

/// Needs >= 3 final fields with the same x_max and doubling n. Throws
/// InvalidArgument on non-nesting grids and Error when a difference is zero.
ConvergenceStudy self_convergence(std::span<const Field> finals);
double self_convergence_order(std::span<const RunHistory> runs);

/// log2 ratios of a sequence of errors on doubling grids.
std::vector<double> observed_orders(std::span<const double> errors);

}  // namespace ohx
