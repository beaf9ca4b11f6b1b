#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ohx {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr double width() const noexcept { return hi - lo; }
  constexpr bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

/// sign(0) := 0.
constexpr double sign(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

using FluxFn = std::function<double(double x, double u)>;

/// Constants of the flux hypotheses, valid on a bounded state box:
///   C  bounds |f_xu| and |f_x| / |u|,
///   L1 is the Lipschitz constant of u -> f_x(x, u),
///   L  bounds the characteristic speed |f_u|.
struct FluxConstants {
  double C = 0.0;
  double L1 = 0.0;
  double L = 0.0;
};

/// Spatially dependent flux f(x, u) together with its partial derivatives.
///
/// `dx` is the partial derivative at fixed u, so the total x-derivative of
/// f(x, u(x)) is du * u_x + dx. Models are immutable once built and safe to
/// evaluate concurrently.
struct FluxModel {
  std::string name;
  FluxFn eval;
  FluxFn du;
  FluxFn dx;
  FluxFn dxu;
  FluxFn duu;

  /// Optional closed form for the zeros of s -> du(x, s) in (lo, hi). When
  /// absent the Engquist-Osher flux falls back to a panel scan + bisection.
  std::function<std::vector<double>(double x, double lo, double hi)> sonic_points;

  FluxConstants constants;
  double state_box_m = 8.0;
  /// x range over which `constants` were sampled.
  Interval x_range{0.0, 50.0};
};

enum class FluxFamily { burgers, weighted_burgers, custom_table };

FluxFamily parse_flux_family(std::string_view name);
std::string_view to_string(FluxFamily family);

struct FluxSpec {
  FluxFamily family = FluxFamily::weighted_burgers;
  /// weighted-burgers: b(x) = a * x * exp(-x / s).
  double a = 4.0;
  double s = 1.0;
  double state_box_m = 8.0;
  /// custom-table: knots of the weight b(x), f = b(x) u^2 / 2, interpolated
  /// by a natural cubic spline.
  std::vector<double> table_x;
  std::vector<double> table_b;
};

/// Builds the model and measures its constants by dense sampling of
/// x_range x [-M, M]. Throws InvalidArgument on non-finite or malformed
/// parameters.
FluxModel make_flux(const FluxSpec& spec);

/// f == 0. Violates genuine nonlinearity; only used to calibrate harnesses
/// against closed-form solutions of the pure source problem.
FluxModel make_zero_flux(double state_box_m = 1e300);

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  bool warn_only = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;

  double sup_fu = 0.0;
  double sup_fxu = 0.0;
  double sup_fx_over_u = 0.0;
  double lipschitz_fx = 0.0;
  double min_abs_fuu = 0.0;
  double nonlinear_fraction = 0.0;
  double max_derivative_mismatch = 0.0;

  /// max_u |f| and max_u |f_x| at the extreme x samples, relative to the
  /// global maxima over the sample set.
  double decay_left_f = 0.0;
  double decay_left_fx = 0.0;
  double decay_right_f = 0.0;
  double decay_right_fx = 0.0;

  FluxConstants measured;
  /// Componentwise min of declared and measured constants.
  FluxConstants effective;

  /// True iff every non-warning check passed.
  bool passed() const;
  const HypothesisCheck* find(std::string_view name) const;
};

/// Check names used in ValidationReport::checks.
namespace checks {
inline constexpr std::string_view derivatives = "derivative-consistency";
inline constexpr std::string_view a1_nonlinear = "A1-genuine-nonlinearity";
inline constexpr std::string_view a1_decay_infinity = "A1-decay-x-to-infinity";
inline constexpr std::string_view a1_decay_zero = "A1-decay-x-to-zero";
inline constexpr std::string_view a2 = "A2-bounded-x-derivative";
inline constexpr std::string_view a3 = "A3-lipschitz-x-derivative";
inline constexpr std::string_view a4 = "A4-bounded-speed";
}  // namespace checks

/// Machine check of the flux hypotheses on x_samples x u_box. The u box is
/// sampled with at least 201 points including both ends; fewer than 200
/// x samples are supplemented with a uniform fill of their hull.
/// `tol` is the relative tolerance of the finite-difference derivative
/// consistency test and of the decay limits.
ValidationReport validate_assumptions(const FluxModel& model, std::span<const double> x_samples,
                                      Interval u_box, double tol = 1e-6);

/// sign(u - c) * (f(x, u) - f(x, c)).
double kruzkov_flux(const FluxModel& model, double x, double u, double c);

/// Gauss-Legendre approximation of q(x, u) = int_0^u eta'(v) f_v(x, v) dv.
/// `kinks` are points where eta' is not smooth; panels are split there.
double entropy_flux_quadrature(const FluxModel& model, const std::function<double(double)>& eta_prime,
                               double x, double u, int n_quad, std::span<const double> kinks = {});

/// Convex entropy with its entropy flux.
struct EntropyPair {
  std::function<double(double)> eta;
  std::function<double(double)> eta_prime;
  std::optional<double> kruzkov_c;

  /// eta(u) = |u - c|; q is anchored at c so q(x, c) = 0.
  static EntropyPair kruzkov(double c);
  /// eta(u) = u^2 / 2.
  static EntropyPair quadratic();

  /// Entropy flux. The Kruzkov pair integrates from c, every other pair
  /// from 0.
  double q(const FluxModel& model, double x, double u, int n_quad = 16) const;
};

}  // namespace ohx
