#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ohx {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (n >= 1), cached per n.
const GaussRule& gauss_legendre(int n);

/// Signed integral of g over [a, b] (a > b flips the sign). Breakpoints
/// strictly between a and b split the range so kinks sit on panel ends.
/// Throws ohx::Error if g returns a non-finite value.
double integrate(const std::function<double(double)>& g, double a, double b, int n_points,
                 std::span<const double> breakpoints = {});

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

}  // namespace ohx
