#include "ohx/flux.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>

#include "ohx/error.hpp"
#include "ohx/quadrature.hpp"

namespace ohx {
namespace {

constexpr double kFdStep = 1e-5;
constexpr double kNonlinearThreshold = 1e-12;
constexpr double kNonlinearFraction = 0.99;
constexpr double kConstantSlack = 1e-9;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string("make_flux: non-finite parameter ") + what);
}

std::vector<double> uniform_samples(Interval range, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = range.lo + range.width() * i / (count - 1);
  return out;
}

/// Natural cubic spline through (x_i, y_i), x strictly increasing.
/// Outside the knot range the end cubic is continued linearly.
class NaturalSpline {
public:
  NaturalSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      diag[i] = 2.0 * (h0 + h1);
      upper[i] = h1;
      rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    // Thomas sweep on the interior rows; m_0 = m_{n-1} = 0.
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double lower = x_[i] - x_[i - 1];
      const double w = lower / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }

  /// Returns value and first derivative.
  std::pair<double, double> operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front() || x >= x_.back()) {
      const bool left = x <= x_.front();
      const std::size_t k = left ? 0 : n - 2;
      const double xe = left ? x_.front() : x_.back();
      const auto [ye, de] = interior(k, xe);
      return {ye + de * (x - xe), de};
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
    return interior(k, x);
  }

private:
  std::pair<double, double> interior(std::size_t k, double x) const {
    const double h = x_[k + 1] - x_[k];
    const double a = (x_[k + 1] - x) / h;
    const double b = (x - x_[k]) / h;
    const double value = a * y_[k] + b * y_[k + 1] +
                         ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
    const double slope = (y_[k + 1] - y_[k]) / h +
                         (-(3.0 * a * a - 1.0) * m_[k] + (3.0 * b * b - 1.0) * m_[k + 1]) * h / 6.0;
    return {value, slope};
  }

  std::vector<double> x_, y_, m_;
};

/// f(x, u) = b(x) u^2 / 2 for a weight given with its derivative.
FluxModel weighted_quadratic(std::string name, std::function<std::pair<double, double>(double)> weight,
                             double m, Interval x_range) {
  FluxModel model;
  model.name = std::move(name);
  model.eval = [weight](double x, double u) { return 0.5 * weight(x).first * u * u; };
  model.du = [weight](double x, double u) { return weight(x).first * u; };
  model.dx = [weight](double x, double u) { return 0.5 * weight(x).second * u * u; };
  model.dxu = [weight](double x, double u) { return weight(x).second * u; };
  model.duu = [weight](double x, double) { return weight(x).first; };
  model.sonic_points = [weight](double x, double lo, double hi) {
    std::vector<double> out;
    if (lo < 0.0 && hi > 0.0 && weight(x).first != 0.0) out.push_back(0.0);
    return out;
  };
  model.state_box_m = m;
  model.x_range = x_range;
  return model;
}

struct SampleStats {
  double sup_fu = 0.0;
  double sup_fxu = 0.0;
  double sup_fx_over_u = 0.0;
  double lipschitz_fx = 0.0;
  double min_abs_fuu = std::numeric_limits<double>::infinity();
  std::size_t nonlinear_count = 0;
  std::size_t total = 0;
  double max_abs_f = 0.0;
  double max_abs_fx = 0.0;
};

SampleStats sample_stats(const FluxModel& model, std::span<const double> xs, std::span<const double> us) {
  SampleStats st;
  for (double x : xs) {
    double prev_fx = 0.0;
    for (std::size_t k = 0; k < us.size(); ++k) {
      const double u = us[k];
      const double f = model.eval(x, u);
      const double fu = model.du(x, u);
      const double fx = model.dx(x, u);
      const double fxu = model.dxu(x, u);
      const double fuu = model.duu(x, u);
      st.sup_fu = std::max(st.sup_fu, std::abs(fu));
      st.sup_fxu = std::max(st.sup_fxu, std::abs(fxu));
      if (u != 0.0) st.sup_fx_over_u = std::max(st.sup_fx_over_u, std::abs(fx) / std::abs(u));
      if (k > 0) st.lipschitz_fx = std::max(st.lipschitz_fx, std::abs(fx - prev_fx) / (u - us[k - 1]));
      st.min_abs_fuu = std::min(st.min_abs_fuu, std::abs(fuu));
      if (std::abs(fuu) > kNonlinearThreshold) ++st.nonlinear_count;
      ++st.total;
      st.max_abs_f = std::max(st.max_abs_f, std::abs(f));
      st.max_abs_fx = std::max(st.max_abs_fx, std::abs(fx));
      prev_fx = fx;
    }
  }
  return st;
}

FluxConstants constants_of(const SampleStats& st) {
  return FluxConstants{std::max(st.sup_fxu, st.sup_fx_over_u), st.lipschitz_fx, st.sup_fu};
}

/// Column maxima over the u samples at one x: {sup|f_u|, C candidate, sup|f_xu|}.
std::array<double, 3> column_max(const FluxModel& model, double x, std::span<const double> us) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (double u : us) {
    out[0] = std::max(out[0], std::abs(model.du(x, u)));
    const double fxu = std::abs(model.dxu(x, u));
    out[1] = std::max(out[1], fxu);
    if (u != 0.0) out[1] = std::max(out[1], std::abs(model.dx(x, u)) / std::abs(u));
    out[2] = std::max(out[2], fxu);
  }
  return out;
}

/// Dense scan of x_range x [-M, M], then golden-section refinement in x
/// around the best sample of each quantity. L1 is declared as sup|f_xu|,
/// which bounds every difference quotient of f_x in u.
void measure_declared_constants(FluxModel& model) {
  const auto xs = uniform_samples(model.x_range, 400);
  const auto us = uniform_samples({-model.state_box_m, model.state_box_m}, 401);
  std::array<double, 3> best{0.0, 0.0, 0.0};
  std::array<std::size_t, 3> arg{0, 0, 0};
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto col = column_max(model, xs[k], us);
    for (int q = 0; q < 3; ++q)
      if (col[q] > best[q]) {
        best[q] = col[q];
        arg[q] = k;
      }
  }
  constexpr double kGolden = 0.6180339887498949;
  for (int q = 0; q < 3; ++q) {
    double lo = xs[arg[q] == 0 ? 0 : arg[q] - 1];
    double hi = xs[std::min(arg[q] + 1, xs.size() - 1)];
    auto g = [&](double x) { return column_max(model, x, us)[q]; };
    double a = hi - kGolden * (hi - lo);
    double b = lo + kGolden * (hi - lo);
    double ga = g(a);
    double gb = g(b);
    for (int it = 0; it < 100 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
      if (ga >= gb) {
        hi = b;
        b = a;
        gb = ga;
        a = hi - kGolden * (hi - lo);
        ga = g(a);
      } else {
        lo = a;
        a = b;
        ga = gb;
        b = lo + kGolden * (hi - lo);
        gb = g(b);
      }
    }
    best[q] = std::max({best[q], ga, gb});
  }
  model.constants = FluxConstants{best[1], best[2], best[0]};
}

/// Central difference of g in its first (along_x) or second argument, with a
/// one-sided second-order stencil where x - h would leave [x_floor, inf).
double finite_difference(const FluxFn& g, double x, double u, bool along_x, double x_floor) {
  const double h = kFdStep;
  if (!along_x) return (g(x, u + h) - g(x, u - h)) / (2.0 * h);
  if (x - h >= x_floor) return (g(x + h, u) - g(x - h, u)) / (2.0 * h);
  return (-3.0 * g(x, u) + 4.0 * g(x + h, u) - g(x + 2.0 * h, u)) / (2.0 * h);
}

double mismatch(double analytic, double numeric) {
  return std::abs(analytic - numeric) / (1.0 + std::abs(analytic));
}

bool within(double measured, double declared) {
  return measured <= declared * (1.0 + kConstantSlack) + std::numeric_limits<double>::min();
}

std::string format_pair(const char* label, double measured, double declared) {
  return std::string(label) + " measured " + std::to_string(measured) + " vs declared " + std::to_string(declared);
}

}  // namespace

FluxFamily parse_flux_family(std::string_view name) {
  if (name == "burgers") return FluxFamily::burgers;
  if (name == "weighted-burgers") return FluxFamily::weighted_burgers;
  if (name == "custom-table") return FluxFamily::custom_table;
  throw InvalidArgument("unknown flux family '" + std::string(name) + "'");
}

std::string_view to_string(FluxFamily family) {
  switch (family) {
    case FluxFamily::burgers: return "burgers";
    case FluxFamily::weighted_burgers: return "weighted-burgers";
    case FluxFamily::custom_table: return "custom-table";
  }
  return "unknown";
}

FluxModel make_flux(const FluxSpec& spec) {
  require_finite(spec.state_box_m, "state_box_m");
  if (spec.state_box_m <= 0.0) throw InvalidArgument("make_flux: state box M must be positive");

  FluxModel model;
  switch (spec.family) {
    case FluxFamily::burgers: {
      model.name = "burgers";
      model.eval = [](double, double u) { return 0.5 * u * u; };
      model.du = [](double, double u) { return u; };
      model.dx = [](double, double) { return 0.0; };
      model.dxu = [](double, double) { return 0.0; };
      model.duu = [](double, double) { return 1.0; };
      model.sonic_points = [](double, double lo, double hi) {
        return (lo < 0.0 && hi > 0.0) ? std::vector<double>{0.0} : std::vector<double>{};
      };
      model.state_box_m = spec.state_box_m;
      model.x_range = {0.0, 50.0};
      break;
    }
    case FluxFamily::weighted_burgers: {
      require_finite(spec.a, "a");
      require_finite(spec.s, "s");
      if (spec.s <= 0.0) throw InvalidArgument("make_flux: weighted-burgers needs s > 0");
      const double a = spec.a;
      const double s = spec.s;
      auto weight = [a, s](double x) {
        const double e = std::exp(-x / s);
        return std::pair{a * x * e, a * e * (1.0 - x / s)};
      };
      model = weighted_quadratic("weighted-burgers", weight, spec.state_box_m, {0.0, 60.0 * s});
      break;
    }
    case FluxFamily::custom_table: {
      if (spec.table_x.size() < 2 || spec.table_x.size() != spec.table_b.size())
        throw InvalidArgument("make_flux: custom-table needs >= 2 matching (x, b) knots");
      for (std::size_t i = 0; i < spec.table_x.size(); ++i) {
        require_finite(spec.table_x[i], "table x");
        require_finite(spec.table_b[i], "table b");
        if (i > 0 && spec.table_x[i] <= spec.table_x[i - 1])
          throw InvalidArgument("make_flux: custom-table x must be strictly increasing");
      }
      auto spline = std::make_shared<const NaturalSpline>(spec.table_x, spec.table_b);
      model = weighted_quadratic("custom-table", [spline](double x) { return (*spline)(x); }, spec.state_box_m,
                                 {spec.table_x.front(), spec.table_x.back()});
      break;
    }
  }
  measure_declared_constants(model);
  return model;
}

FluxModel make_zero_flux(double state_box_m) {
  FluxModel model;
  model.name = "zero";
  const FluxFn zero = [](double, double) { return 0.0; };
  model.eval = model.du = model.dx = model.dxu = model.duu = zero;
  model.sonic_points = [](double, double, double) { return std::vector<double>{}; };
  model.state_box_m = state_box_m;
  model.constants = {};
  return model;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.pass || c.warn_only; });
}

const HypothesisCheck* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate_assumptions(const FluxModel& model, std::span<const double> x_samples, Interval u_box,
                                      double tol) {
  if (x_samples.empty()) throw InvalidArgument("validate_assumptions: no x samples");
  if (!(std::isfinite(u_box.lo) && std::isfinite(u_box.hi)) || u_box.hi < u_box.lo)
    throw InvalidArgument("validate_assumptions: u box must be bounded");

  std::vector<double> xs(x_samples.begin(), x_samples.end());
  std::sort(xs.begin(), xs.end());
  if (xs.size() < 200 && xs.back() > xs.front()) {
    const auto fill = uniform_samples({xs.front(), xs.back()}, 200);
    xs.insert(xs.end(), fill.begin(), fill.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  }
  const auto us = u_box.width() > 0.0 ? uniform_samples(u_box, 201) : std::vector<double>{u_box.lo};

  ValidationReport report;
  const SampleStats st = sample_stats(model, xs, us);
  report.sup_fu = st.sup_fu;
  report.sup_fxu = st.sup_fxu;
  report.sup_fx_over_u = st.sup_fx_over_u;
  report.lipschitz_fx = st.lipschitz_fx;
  report.min_abs_fuu = st.min_abs_fuu;
  report.nonlinear_fraction = st.total ? static_cast<double>(st.nonlinear_count) / st.total : 0.0;
  report.measured = constants_of(st);
  const FluxConstants& declared = model.constants;
  report.effective = {std::min(declared.C, report.measured.C), std::min(declared.L1, report.measured.L1),
                      std::min(declared.L, report.measured.L)};

  // Derivative consistency against finite differences of the lower-order callables.
  double worst = 0.0;
  const double x_floor = std::min(model.x_range.lo, xs.front());
  for (double x : xs) {
    for (double u : us) {
      worst = std::max(worst, mismatch(model.du(x, u), finite_difference(model.eval, x, u, false, x_floor)));
      worst = std::max(worst, mismatch(model.dx(x, u), finite_difference(model.eval, x, u, true, x_floor)));
      worst = std::max(worst, mismatch(model.duu(x, u), finite_difference(model.du, x, u, false, x_floor)));
      worst = std::max(worst, mismatch(model.dxu(x, u), finite_difference(model.dx, x, u, false, x_floor)));
    }
  }
  report.max_derivative_mismatch = worst;
  report.checks.push_back({std::string(checks::derivatives), worst <= tol, false,
                           "max relative mismatch " + std::to_string(worst)});

  report.checks.push_back({std::string(checks::a1_nonlinear), report.nonlinear_fraction >= kNonlinearFraction, false,
                           "fraction |f_uu| > 1e-12: " + std::to_string(report.nonlinear_fraction)});

  auto edge_ratio = [&](double x, const FluxFn& g, double global) {
    if (global <= 0.0) return 0.0;
    double m = 0.0;
    for (double u : us) m = std::max(m, std::abs(g(x, u)));
    return m / global;
  };
  report.decay_left_f = edge_ratio(xs.front(), model.eval, st.max_abs_f);
  report.decay_left_fx = edge_ratio(xs.front(), model.dx, st.max_abs_fx);
  report.decay_right_f = edge_ratio(xs.back(), model.eval, st.max_abs_f);
  report.decay_right_fx = edge_ratio(xs.back(), model.dx, st.max_abs_fx);

  report.checks.push_back({std::string(checks::a1_decay_infinity),
                           report.decay_right_f <= tol && report.decay_right_fx <= tol, false,
                           "relative |f|, |f_x| at x=" + std::to_string(xs.back()) + ": " +
                               std::to_string(report.decay_right_f) + ", " + std::to_string(report.decay_right_fx)});
  report.checks.push_back({std::string(checks::a1_decay_zero),
                           report.decay_left_f <= tol && report.decay_left_fx <= tol, true,
                           "relative |f|, |f_x| at x=" + std::to_string(xs.front()) + ": " +
                               std::to_string(report.decay_left_f) + ", " + std::to_string(report.decay_left_fx)});

  report.checks.push_back({std::string(checks::a2),
                           within(report.sup_fxu, declared.C) && within(report.sup_fx_over_u, declared.C), false,
                           format_pair("sup|f_xu|", report.sup_fxu, declared.C) + "; " +
                               format_pair("sup|f_x|/|u|", report.sup_fx_over_u, declared.C)});
  report.checks.push_back({std::string(checks::a3), within(report.lipschitz_fx, declared.L1), false,
                           format_pair("Lipschitz(f_x)", report.lipschitz_fx, declared.L1)});
  report.checks.push_back({std::string(checks::a4), within(report.sup_fu, declared.L), false,
                           format_pair("sup|f_u|", report.sup_fu, declared.L)});
  return report;
}

double kruzkov_flux(const FluxModel& model, double x, double u, double c) {
  return sign(u - c) * (model.eval(x, u) - model.eval(x, c));
}

double entropy_flux_quadrature(const FluxModel& model, const std::function<double(double)>& eta_prime, double x,
                               double u, int n_quad, std::span<const double> kinks) {
  if (n_quad < 2) throw InvalidArgument("entropy_flux_quadrature: n_quad must be >= 2");
  return integrate([&](double v) { return eta_prime(v) * model.du(x, v); }, 0.0, u, n_quad, kinks);
}

EntropyPair EntropyPair::kruzkov(double c) {
  EntropyPair pair;
  pair.eta = [c](double u) { return std::abs(u - c); };
  pair.eta_prime = [c](double u) { return sign(u - c); };
  pair.kruzkov_c = c;
  return pair;
}

EntropyPair EntropyPair::quadratic() {
  EntropyPair pair;
  pair.eta = [](double u) { return 0.5 * u * u; };
  pair.eta_prime = [](double u) { return u; };
  return pair;
}

double EntropyPair::q(const FluxModel& model, double x, double u, int n_quad) const {
  if (kruzkov_c) {
    const double c = *kruzkov_c;
    return integrate([&](double v) { return eta_prime(v) * model.du(x, v); }, c, u, n_quad);
  }
  return entropy_flux_quadrature(model, eta_prime, x, u, n_quad);
}

}  // namespace ohx
