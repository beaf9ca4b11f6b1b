#pragma once

#include <span>
#include <vector>

#include "ohx/flux.hpp"
#include "ohx/grid.hpp"

namespace ohx {

/// P(x_i) = int_0^{x_i} u dy at cell centers, anchored at P(0) = 0.
struct Primitive {
  Grid grid;
  std::vector<double> values;
  double time = 0.0;
};

/// Midpoint prefix sum with half-cell offset: P_i = dx * (u_1 + ... + u_i) - dx/2 * u_i.
/// Exact for constants, second order for smooth u.
Primitive cumulative_primitive(const Field& u);

/// Kernel form used by the solver; `out` must have the length of `u`.
void cumulative_primitive(std::span<const double> u, double dx, std::span<double> out) noexcept;

/// dx * sum(u_i), compensated.
double mean(const Field& u);
double mean(std::span<const double> u, double dx);

/// max |P_i| over centers inside `window`. Throws InvalidArgument when the
/// window is not inside [0, x_max] or contains no center.
double sup_local(const Primitive& p, Interval window);

/// Same monitor for cell values.
double sup_local(const Grid& grid, std::span<const double> values, Interval window);

}  // namespace ohx
