#include "ohx/nonlocal.hpp"

#include <algorithm>
#include <cmath>

#include "ohx/error.hpp"
#include "ohx/quadrature.hpp"

namespace ohx {

void cumulative_primitive(std::span<const double> u, double dx, std::span<double> out) noexcept {
  double running = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    running += u[i];
    out[i] = dx * (running - 0.5 * u[i]);
  }
}

Primitive cumulative_primitive(const Field& u) {
  Primitive p{u.grid, std::vector<double>(u.values.size()), u.time};
  cumulative_primitive(u.values, u.grid.dx(), p.values);
  return p;
}

double mean(std::span<const double> u, double dx) { return dx * compensated_sum(u); }

double mean(const Field& u) { return mean(u.values, u.grid.dx()); }

double sup_local(const Grid& grid, std::span<const double> values, Interval window) {
  const double slack = 1e-12 * grid.x_max();
  if (window.lo < -slack || window.hi > grid.x_max() + slack || window.hi < window.lo)
    throw InvalidArgument("sup_local: window must lie inside [0, x_max]");
  bool any = false;
  double best = 0.0;
  for (int i = 0; i < grid.n(); ++i) {
    const double x = grid.center(i);
    if (x < window.lo || x > window.hi) continue;
    any = true;
    best = std::max(best, std::abs(values[static_cast<std::size_t>(i)]));
  }
  if (!any) throw InvalidArgument("sup_local: window contains no cell center");
  return best;
}

double sup_local(const Primitive& p, Interval window) { return sup_local(p.grid, p.values, window); }

}  // namespace ohx
