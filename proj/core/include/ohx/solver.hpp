#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ohx/error.hpp"
#include "ohx/flux.hpp"
#include "ohx/grid.hpp"
#include "ohx/nonlocal.hpp"

namespace ohx {

enum class NumericalFlux { rusanov, engquist_osher };
enum class Integrator { ssp_rk2, ssp_rk3 };

NumericalFlux parse_numerical_flux(std::string_view name);
Integrator parse_integrator(std::string_view name);
std::string_view to_string(NumericalFlux kind);
std::string_view to_string(Integrator kind);

struct SolverConfig {
  double epsilon = 0.0;
  NumericalFlux numerical_flux = NumericalFlux::engquist_osher;
  Integrator integrator = Integrator::ssp_rk2;
  double cfl = 0.5;
  double t_end = 2.0;
  /// A snapshot is kept every `output_stride` steps, plus t = 0 and t_end.
  int output_stride = 1;
  /// Turns the nonlocal source P off. Only used for the exact Riemann
  /// oracles of the plain conservation law.
  bool nonlocal_source = true;
  /// Window of the sup|u|, sup|P| monitors; whole domain when empty.
  std::optional<Interval> monitor_window;
};

/// Throws InvalidArgument unless cfl in (0, 1], epsilon >= 0, t_end > 0 and
/// output_stride >= 1.
void check_config(const SolverConfig& config);

struct StepDiagnostics {
  double time = 0.0;
  double dt = 0.0;
  double mean = 0.0;
  double l2 = 0.0;
  double sup_u = 0.0;
  double sup_p = 0.0;
};

struct Snapshot {
  Field u;
  Primitive p;

  double time() const noexcept { return u.time; }
};

struct RunHistory {
  Grid grid;
  std::string flux_name;
  SolverConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<StepDiagnostics> steps;
  std::vector<std::string> warnings;

  const Snapshot& initial() const { return snapshots.front(); }
  const Snapshot& final() const { return snapshots.back(); }
};

enum class FaultKind { non_finite, blow_up, box_exit };

std::string_view to_string(FaultKind kind);

/// Raised when the state leaves the flux validation box [-M, M], grows past
/// 10 M, or turns non-finite. Carries the history up to the last finite step.
class SolverFault : public Error {
public:
  SolverFault(FaultKind kind, const std::string& what, std::shared_ptr<const RunHistory> partial = nullptr)
      : Error(what), kind_(kind), partial_(std::move(partial)) {}

  FaultKind kind() const noexcept { return kind_; }
  const std::shared_ptr<const RunHistory>& partial() const noexcept { return partial_; }

private:
  FaultKind kind_;
  std::shared_ptr<const RunHistory> partial_;
};

/// Two-point flux at an interface. Rusanov uses the local speed
/// max(|f_u(uL)|, |f_u(uR)|); Engquist-Osher splits the signed-part integrals
/// of f_u at its sonic points, where each piece integrates exactly to a
/// difference of f.
double numerical_flux_value(const FluxModel& model, double x_iface, double u_left, double u_right,
                            NumericalFlux kind);

/// Zeros of s -> f_u(x, s) strictly inside (lo, hi): the model's closed form
/// when provided, otherwise a 64-panel sign scan refined by bisection.
std::vector<double> sonic_points(const FluxModel& model, double x, double lo, double hi);

/// Method-of-lines right-hand side of
///   u_t + f(x, u)_x = P + epsilon u_xx
/// with ghost u_0 = -u_1 for diffusion, boundary state 0 at the x = 0
/// interface for convection, and zero extension at x_max. Buffers are reused
/// across calls; one instance per thread.
class RhsEvaluator {
public:
  RhsEvaluator(const Grid& grid, const FluxModel& model, double epsilon, NumericalFlux kind,
               bool nonlocal_source = true);

  /// Throws SolverFault(box_exit) if any |u_i| > M, Error if non-finite.
  void operator()(std::span<const double> u, std::span<double> tendency);

  std::span<const double> last_primitive() const noexcept { return primitive_; }

private:
  Grid grid_;
  const FluxModel* model_;
  double epsilon_;
  NumericalFlux kind_;
  bool source_;
  std::vector<double> primitive_;
  std::vector<double> face_flux_;
};

/// Convenience wrapper returning the tendency as a Field.
Field semi_discrete_rhs(const Field& u, const FluxModel& model, double epsilon, NumericalFlux kind,
                        bool nonlocal_source = true);

/// cfl * min(dx / alpha_max, dx^2 / (2 epsilon), 1 / (x_max + 1)), with the
/// diffusive term skipped for epsilon = 0 and the source term skipped when
/// the source is off; alpha_max = max_i |f_u(x_i, u_i)| floored at 1e-12.
double stable_dt(const Field& u, const FluxModel& model, const SolverConfig& config);

/// Advances u0 to config.t_end. Deterministic: identical inputs give
/// bit-identical histories. Throws SolverFault on non-finite state, blow-up
/// (sup|u| > 10 M) or exit from the validation box.
RunHistory solve(const Field& u0, const FluxModel& model, const SolverConfig& config);

struct SweepReport {
  std::vector<double> eps;
  std::vector<RunHistory> runs;
  /// L1 distance at t_end between runs k and k + 1.
  std::vector<double> successive;
  /// L1 distance at t_end of every epsilon > 0 run to the epsilon = 0 run
  /// (empty when the list has no zero entry).
  std::vector<double> to_inviscid;
};

/// One solve per epsilon on the same grid, run concurrently. eps_list must
/// be nonincreasing and nonnegative; repeated entries are allowed and give
/// a zero distance.
SweepReport viscosity_sweep(const Field& u0, const FluxModel& model, const SolverConfig& base,
                            std::span<const double> eps_list);

}  // namespace ohx
