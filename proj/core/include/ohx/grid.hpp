#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "ohx/flux.hpp"

namespace ohx {

/// Uniform truncation (0, x_max) of the half-line into n cells.
/// Cell i (0-based) has center (i + 1/2) dx and interfaces i dx, (i + 1) dx.
class Grid {
public:
  Grid() = default;

  double x_max() const noexcept { return x_max_; }
  int n() const noexcept { return n_; }
  double dx() const noexcept { return x_max_ / n_; }
  double center(int i) const noexcept { return (i + 0.5) * dx(); }
  double interface(int i) const noexcept { return i * dx(); }
  std::vector<double> centers() const;

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  friend Grid make_grid(double x_max, int n);
  Grid(double x_max, int n) : x_max_(x_max), n_(n) {}

  double x_max_ = 1.0;
  int n_ = 4;
};

/// Throws InvalidArgument unless x_max > 0 and n >= 4.
Grid make_grid(double x_max, int n);

/// Cell-centered values of u at one time level.
struct Field {
  Grid grid;
  std::vector<double> values;
  double time = 0.0;

  /// Zero field on `grid`.
  static Field zeros(const Grid& grid, double time = 0.0);
};

/// Throws ohx::Error if the length is wrong or a value is non-finite.
void check_field(const Field& field);

namespace profiles {

/// (x - mu) exp(-(x - mu)^2 / w).
struct GaussianDipole {
  double mu = 5.0;
  double w = 1.0;
};

/// +1 on [left, mid), -1 on [mid, right), 0 elsewhere.
struct BoxDipole {
  double left = 1.0;
  double mid = 2.0;
  double right = 3.0;
};

/// Sum of `modes` Gaussian dipoles with seeded centers in [lo, hi],
/// widths in [0.3, 1.5] and amplitudes in [-amplitude, amplitude].
struct RandomZeroMean {
  std::uint64_t seed = 0;
  int modes = 4;
  double lo = 2.0;
  double hi = 8.0;
  double amplitude = 0.5;
};

/// Step from u_left to u_right at x0, smoothed by tanh over `width`
/// (width == 0 gives the sharp step, midpoint value at x0).
struct RiemannStep {
  double x0 = 1.0;
  double u_left = 1.0;
  double u_right = 0.0;
  double width = 0.0;
};

/// Samples (x, u), x strictly increasing; linear interpolation between
/// knots, zero outside.
struct SampleTable {
  std::vector<double> x;
  std::vector<double> u;
};

}  // namespace profiles

using InitialData = std::variant<profiles::GaussianDipole, profiles::BoxDipole, profiles::RandomZeroMean,
                                 profiles::RiemannStep, profiles::SampleTable>;

/// Pointwise value of the profile.
double evaluate_profile(const InitialData& data, double x);

/// Samples the profile at cell centers; with enforce_zero_mean, subtracts the
/// discrete mean so that dx * sum(u) vanishes to rounding. Time is 0.
Field project_initial(const InitialData& data, const Grid& grid, bool enforce_zero_mean);

/// Subtracts the discrete mean in place (two compensated passes).
void remove_mean(std::span<double> values);

/// Standard bump exp(-1 / (1 - z^2)) on (-1, 1), zero elsewhere.
double bump(double z) noexcept;
/// d/dz of bump(z).
double bump_derivative(double z) noexcept;

/// Discrete convolution with the unit-mass bump of radius delta (zero
/// extension across both ends), followed by mean removal. Throws
/// InvalidArgument if delta < dx.
Field mollify_initial(const Field& field, double delta);

/// Cell averaging 2-to-1; requires an even cell count.
Field restrict_by_averaging(const Field& fine);

/// dx * sum |a_i - b_i|; throws InvalidArgument on mismatched grids.
double l1_distance(const Field& a, const Field& b);

/// Largest cell center where |u| exceeds rel * max|u| (0 for a zero field).
double support_radius(const Field& field, double rel = 1e-6);

/// Minimum truncation length for data of the given support radius moving at
/// speed <= speed over [0, t_end]: (support + speed * t_end) * 1.2.
double required_domain_length(double support, double speed, double t_end);

}  // namespace ohx
