#include "ohx/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ohx/error.hpp"
#include "ohx/quadrature.hpp"
#include "ohx/random.hpp"

namespace ohx {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double table_value(const profiles::SampleTable& table, double x) {
  const auto& xs = table.x;
  if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return table.u.back();
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return (1.0 - t) * table.u[k - 1] + t * table.u[k];
}

double random_value(const profiles::RandomZeroMean& p, double x) {
  CounterRng rng(p.seed, /*stream=*/1);
  double sum = 0.0;
  for (int k = 0; k < p.modes; ++k) {
    const double center = rng.uniform(p.lo, p.hi);
    const double width = rng.uniform(0.3, 1.5);
    const double amp = rng.uniform(-p.amplitude, p.amplitude);
    const double z = x - center;
    sum += amp * z * std::exp(-z * z / width);
  }
  return sum;
}

}  // namespace

Grid make_grid(double x_max, int n) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw InvalidArgument("make_grid: x_max must be positive");
  if (n < 4) throw InvalidArgument("make_grid: need at least 4 cells");
  return Grid(x_max, n);
}

std::vector<double> Grid::centers() const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = center(i);
  return out;
}

Field Field::zeros(const Grid& grid, double time) {
  return Field{grid, std::vector<double>(static_cast<std::size_t>(grid.n()), 0.0), time};
}

void check_field(const Field& field) {
  if (field.values.size() != static_cast<std::size_t>(field.grid.n()))
    throw Error("field length " + std::to_string(field.values.size()) + " does not match grid of " +
                std::to_string(field.grid.n()) + " cells");
  for (double v : field.values)
    if (!std::isfinite(v)) throw Error("field contains a non-finite value");
}

double evaluate_profile(const InitialData& data, double x) {
  return std::visit(
      overloaded{
          [x](const profiles::GaussianDipole& p) {
            const double z = x - p.mu;
            return z * std::exp(-z * z / p.w);
          },
          [x](const profiles::BoxDipole& p) {
            if (x >= p.left && x < p.mid) return 1.0;
            if (x >= p.mid && x < p.right) return -1.0;
            return 0.0;
          },
          [x](const profiles::RandomZeroMean& p) { return random_value(p, x); },
          [x](const profiles::RiemannStep& p) {
            if (p.width > 0.0) {
              const double s = 0.5 * (1.0 + std::tanh((x - p.x0) / p.width));
              return p.u_left + (p.u_right - p.u_left) * s;
            }
            if (x < p.x0) return p.u_left;
            if (x > p.x0) return p.u_right;
            return 0.5 * (p.u_left + p.u_right);
          },
          [x](const profiles::SampleTable& p) { return table_value(p, x); },
      },
      data);
}

void remove_mean(std::span<double> values) {
  if (values.empty()) return;
  for (int pass = 0; pass < 2; ++pass) {
    const double m = compensated_sum(values) / static_cast<double>(values.size());
    if (m == 0.0) break;
    for (double& v : values) v -= m;
  }
}

Field project_initial(const InitialData& data, const Grid& grid, bool enforce_zero_mean) {
  Field field = Field::zeros(grid, 0.0);
  for (int i = 0; i < grid.n(); ++i) {
    const double v = evaluate_profile(data, grid.center(i));
    if (!std::isfinite(v))
      throw Error("project_initial: profile is non-finite at x=" + std::to_string(grid.center(i)));
    field.values[static_cast<std::size_t>(i)] = v;
  }
  if (enforce_zero_mean) remove_mean(field.values);
  return field;
}

double bump(double z) noexcept {
  if (z <= -1.0 || z >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - z * z));
}

double bump_derivative(double z) noexcept {
  if (z <= -1.0 || z >= 1.0) return 0.0;
  const double d = 1.0 - z * z;
  return bump(z) * (-2.0 * z / (d * d));
}

Field mollify_initial(const Field& field, double delta) {
  const Grid& grid = field.grid;
  const double dx = grid.dx();
  if (delta < dx * (1.0 - 1e-12)) throw InvalidArgument("mollify_initial: delta must be at least dx");

  // Kernel taps j with |j dx| < delta, normalized to unit discrete mass.
  const int reach = static_cast<int>(std::ceil(delta / dx));
  std::vector<double> kernel(static_cast<std::size_t>(2 * reach + 1), 0.0);
  for (int j = -reach; j <= reach; ++j) kernel[static_cast<std::size_t>(j + reach)] = bump(j * dx / delta);
  if (kernel[static_cast<std::size_t>(reach)] == 0.0) kernel[static_cast<std::size_t>(reach)] = 1.0;
  const double mass = compensated_sum(kernel);
  for (double& k : kernel) k /= mass;

  Field out = Field::zeros(grid, field.time);
  const int n = grid.n();
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -reach; j <= reach; ++j) {
      const int src = i - j;
      if (src < 0 || src >= n) continue;
      acc += kernel[static_cast<std::size_t>(j + reach)] * field.values[static_cast<std::size_t>(src)];
    }
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  remove_mean(out.values);
  return out;
}

Field restrict_by_averaging(const Field& fine) {
  const int n = fine.grid.n();
  if (n % 2 != 0 || n / 2 < 4) throw InvalidArgument("restrict_by_averaging: need an even count of >= 8 cells");
  Field coarse = Field::zeros(make_grid(fine.grid.x_max(), n / 2), fine.time);
  for (int i = 0; i < n / 2; ++i)
    coarse.values[static_cast<std::size_t>(i)] =
        0.5 * (fine.values[static_cast<std::size_t>(2 * i)] + fine.values[static_cast<std::size_t>(2 * i + 1)]);
  return coarse;
}

double l1_distance(const Field& a, const Field& b) {
  if (!(a.grid == b.grid)) throw InvalidArgument("l1_distance: fields live on different grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sum += std::abs(a.values[i] - b.values[i]);
  return a.grid.dx() * sum;
}

double support_radius(const Field& field, double rel) {
  double peak = 0.0;
  for (double v : field.values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  for (int i = field.grid.n() - 1; i >= 0; --i)
    if (std::abs(field.values[static_cast<std::size_t>(i)]) > rel * peak) return field.grid.center(i);
  return 0.0;
}

double required_domain_length(double support, double speed, double t_end) {
  return 1.2 * (support + speed * t_end);
}

}  // namespace ohx
