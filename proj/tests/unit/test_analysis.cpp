#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include <ohx/analysis.hpp>
#include <ohx/error.hpp>
#include <ohx/quadrature.hpp>

using namespace ohx;

namespace {

FluxModel burgers() {
  FluxSpec spec;
  spec.family = FluxFamily::burgers;
  return make_flux(spec);
}

FluxModel weighted() { return make_flux(FluxSpec{}); }

RunHistory zero_run(double epsilon = 0.0) {
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.cfl = 0.1;
  cfg.epsilon = epsilon;
  return solve(Field::zeros(make_grid(10.0, 100)), weighted(), cfg);
}

// cfl shrinks with dx so that dt refines together with the grid.
RunHistory smooth_run(int n, double epsilon = 0.0, double t_end = 0.5, double scale = 0.3) {
  SolverConfig cfg;
  cfg.t_end = t_end;
  cfg.cfl = 0.5 * 200.0 / n;
  cfg.epsilon = epsilon;
  Field u0 = project_initial(profiles::GaussianDipole{5.0, 1.0}, make_grid(20.0, n), true);
  for (double& v : u0.values) v *= scale;
  return solve(u0, weighted(), cfg);
}

RunHistory expansion_shock(int n) {
  const Grid grid = make_grid(4.0, n);
  RunHistory h;
  h.grid = grid;
  h.flux_name = "burgers";
  h.config.t_end = 1.0;
  h.config.nonlocal_source = false;
  for (int k = 0; k <= 200; ++k) {
    Field u = Field::zeros(grid, k / 200.0);
    for (int i = 0; i < n; ++i) u.values[static_cast<std::size_t>(i)] = grid.center(i) < 2.0 ? -1.0 : 1.0;
    Primitive p{grid, std::vector<double>(static_cast<std::size_t>(n), 0.0), u.time};
    h.snapshots.push_back({std::move(u), std::move(p)});
  }
  return h;
}

}  // namespace

TEST(TestFunction, PartialsMatchDifferences) {
  const TestFunction phi{3.0, 0.5, 0.7, 0.3, 2.0};
  const double h = 1e-6;
  for (double x : {2.5, 3.1, 3.6})
    for (double t : {0.3, 0.55, 0.7}) {
      EXPECT_NEAR(phi.dx(x, t), (phi.value(x + h, t) - phi.value(x - h, t)) / (2 * h), 1e-6);
      EXPECT_NEAR(phi.dt(x, t), (phi.value(x, t + h) - phi.value(x, t - h)) / (2 * h), 1e-6);
    }
  EXPECT_EQ(phi.value(3.71, 0.5), 0.0);
  EXPECT_EQ(phi.value(3.0, 0.81), 0.0);
  EXPECT_NEAR(phi.value(3.0, 0.5), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_GT(phi.c1_norm(), phi.value(3.0, 0.5));
}

TEST(TestFunction, InteriorGuard) {
  const Grid g = make_grid(10.0, 100);
  EXPECT_NO_THROW(check_interior(TestFunction{5.0, 0.5, 1.0, 0.2}, g, 1.0));
  EXPECT_THROW(check_interior(TestFunction{0.5, 0.5, 0.5, 0.2}, g, 1.0), InvalidArgument);
  EXPECT_THROW(check_interior(TestFunction{5.0, 0.9, 1.0, 0.2}, g, 1.0), InvalidArgument);
  EXPECT_THROW(check_interior(TestFunction{5.0, 0.5, 0.0, 0.2}, g, 1.0), InvalidArgument);
}

TEST(TestFunction, RandomFamilyIsInteriorAndSeeded) {
  const Grid g = make_grid(30.0, 600);
  const auto a = random_test_functions(g, 2.0, Interval{0.0, 30.0}, 20, 11);
  const auto b = random_test_functions(g, 2.0, Interval{0.0, 30.0}, 20, 11);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NO_THROW(check_interior(a[k], g, 2.0));
    EXPECT_EQ(a[k].x0, b[k].x0);
    EXPECT_EQ(a[k].rt, b[k].rt);
  }
  EXPECT_NE(random_test_functions(g, 2.0, Interval{0.0, 30.0}, 1, 12)[0].x0, a[0].x0);
}

TEST(Analysis, L2Norm) {
  EXPECT_EQ(l2_norm(Field::zeros(make_grid(4.0, 10))), 0.0);
  Field one = Field::zeros(make_grid(4.0, 40));
  std::fill(one.values.begin(), one.values.end(), 1.0);
  EXPECT_DOUBLE_EQ(l2_norm(one), 2.0);
  // Continuum value: int z^2 e^{-2 z^2} dz = sqrt(pi) / (4 sqrt 2).
  const double exact = std::sqrt(std::sqrt(std::acos(-1.0)) / (4.0 * std::sqrt(2.0)));
  const double a = l2_norm(project_initial(profiles::GaussianDipole{5.0, 1.0}, make_grid(20.0, 400), false));
  const double b = l2_norm(project_initial(profiles::GaussianDipole{5.0, 1.0}, make_grid(20.0, 800), false));
  EXPECT_NEAR(a, exact, 1e-3);
  EXPECT_LT(std::abs(a - b), 4.0 * 0.05 * 0.05);
}

TEST(Analysis, GronwallZeroAndSmooth) {
  const EstimateReport zero = gronwall_energy_check(zero_run(), 1.0);
  EXPECT_TRUE(zero.pass);
  EXPECT_EQ(zero.lhs, 0.0);
  const RunHistory h = smooth_run(200);
  EXPECT_TRUE(gronwall_energy_check(h, weighted().constants.C).pass);
  EXPECT_FALSE(gronwall_energy_check(h, 0.0, 0.0).pass || h.final().u.values == h.initial().u.values);
  EXPECT_THROW(gronwall_energy_check(h, -1.0), InvalidArgument);
}

TEST(Analysis, EnergyBalance) {
  const EstimateReport zero = energy_balance_residual(zero_run(0.05), weighted(), 0.05);
  EXPECT_TRUE(zero.pass);
  EXPECT_EQ(zero.extras.at(0).second, 0.0);
  EXPECT_THROW(energy_balance_residual(zero_run(0.0), weighted(), 0.0), InvalidArgument);

  std::vector<double> residuals;
  for (int n : {200, 400, 800}) {
    RunHistory h = smooth_run(n, 0.05);
    if (n == 200) {
      EXPECT_THROW(energy_balance_residual(h, weighted(), 0.05), InvalidArgument);
    }
    h = [&] {
      SolverConfig cfg = h.config;
      cfg.cfl = 0.1 * 200.0 / n;
      return solve(h.initial().u, weighted(), cfg);
    }();
    const EstimateReport r = energy_balance_residual(h, weighted(), 0.05);
    EXPECT_TRUE(r.pass) << r.detail;
    residuals.push_back(r.extras.at(0).second);
  }
  EXPECT_GT(residuals[0], residuals[2]);
}

TEST(Analysis, WeakFormZeroAndLocality) {
  const RunHistory zero = zero_run();
  const TestFunction phi{5.0, 0.5, 1.0, 0.2};
  EXPECT_EQ(weak_form_residual(zero, weighted(), phi), 0.0);
  EXPECT_EQ(kruzkov_residual(zero, weighted(), 0.0, phi), 0.0);

  // Source off: finite speed keeps the far field at rest.
  SolverConfig cfg;
  cfg.t_end = 0.5;
  cfg.nonlocal_source = false;
  const RunHistory h =
      solve(project_initial(profiles::GaussianDipole{5.0, 1.0}, make_grid(20.0, 400), true), burgers(), cfg);
  EXPECT_NEAR(weak_form_residual(h, burgers(), TestFunction{17.0, 0.25, 1.0, 0.1}), 0.0, 1e-12);
}

TEST(Analysis, WeakFormConvergesUnderRefinement) {
  std::vector<double> worst;
  for (int n : {400, 800, 1600}) {
    const RunHistory h = smooth_run(n, 0.0, 0.5);
    const auto phis = random_test_functions(h.grid, 0.5, Interval{0.0, 12.0}, 20, 4);
    double w = 0.0;
    for (const auto& phi : phis) w = std::max(w, std::abs(weak_form_residual(h, weighted(), phi)));
    worst.push_back(w);
  }
  for (double p : observed_orders(worst)) EXPECT_GE(p, 0.9);
}

TEST(Analysis, KruzkovZeroRunNonzeroConstant) {
  // u = 0 solves the equation, so every Kruzkov residual vanishes; the
  // sign(c) f_x(x, c) phi term cancels the integrated flux term.
  const RunHistory zero = zero_run();
  const FluxModel f = weighted();
  const TestFunction phi{3.0, 0.5, 1.0, 0.2};
  for (double c : {-1.5, 0.7}) {
    const double source_term = integrate(
        [&](double x) {
          return integrate([&](double t) { return f.dx(x, c) * phi.value(x, t); }, 0.3, 0.7, 16);
        },
        2.0, 4.0, 32);
    EXPECT_GT(std::abs(source_term), 1e-3);
    EXPECT_LT(std::abs(kruzkov_residual(zero, f, c, phi)), 1e-2 * std::abs(source_term));
  }
}

TEST(Analysis, ResidualsAreLinearInPhi) {
  const RunHistory h = smooth_run(400);
  TestFunction phi{5.0, 0.25, 1.0, 0.1};
  const double w = weak_form_residual(h, weighted(), phi);
  const double k = kruzkov_residual(h, weighted(), 0.1, phi);
  phi.scale = 2.5;
  EXPECT_NEAR(weak_form_residual(h, weighted(), phi), 2.5 * w, 1e-14 + 1e-12 * std::abs(w));
  EXPECT_NEAR(kruzkov_residual(h, weighted(), 0.1, phi), 2.5 * k, 1e-14 + 1e-12 * std::abs(k));
}

TEST(Analysis, EntropyCertificatePassesMonotoneRun) {
  const RunHistory h = smooth_run(400, 0.0, 0.5, 1.0);
  const auto phis = random_test_functions(h.grid, 0.5, Interval{0.0, 20.0}, 20, 3);
  const auto cs = state_quantiles(h, 9);
  ASSERT_EQ(cs.size(), 9u);
  EXPECT_TRUE(std::is_sorted(cs.begin(), cs.end()));
  const EntropyCertificate cert = certify_entropy(h, weighted(), cs, phis);
  EXPECT_EQ(cert.normalized.size(), 180u);
  EXPECT_TRUE(cert.report.pass) << cert.report.lhs;
}

TEST(Analysis, ExpansionShockFailsEntropy) {
  const RunHistory h = expansion_shock(1200);
  const TestFunction phi{2.0, 0.5, 0.1, 0.25};
  const double r = kruzkov_residual(h, burgers(), 0.0, phi);
  EXPECT_LT(r, -10.0 * entropy_tolerance(phi, h.grid.dx()));
  // The same data is a weak solution.
  EXPECT_NEAR(weak_form_residual(h, burgers(), phi), 0.0, entropy_tolerance(phi, h.grid.dx()));
}

TEST(Analysis, StabilityIdenticalAndGuards) {
  const RunHistory u = smooth_run(200);
  const FluxConstants k = constants_on_range(weighted(), u.grid, state_bound(u));
  const EstimateReport same = stability_check(u, u, 5.0, k);
  EXPECT_TRUE(same.pass);
  EXPECT_EQ(same.lhs, 0.0);
  EXPECT_THROW(stability_check(u, u, 19.9, k), InvalidArgument);
  EXPECT_THROW(stability_check(u, smooth_run(400), 5.0, k), InvalidArgument);
}

TEST(Analysis, StabilityPerturbedPair) {
  const RunHistory u = smooth_run(200);
  Field v0 = u.initial().u;
  profiles::RandomZeroMean bump;
  bump.seed = 2;
  bump.amplitude = 0.02;
  const Field delta = project_initial(bump, v0.grid, true);
  for (std::size_t i = 0; i < v0.values.size(); ++i) v0.values[i] += delta.values[i];
  const RunHistory v = solve(v0, weighted(), u.config);
  const double bound = std::max(state_bound(u), state_bound(v));
  const EstimateReport r = stability_check(u, v, 8.0, constants_on_range(weighted(), u.grid, bound));
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.margin, 0.0);
}

TEST(Analysis, SelfConvergence) {
  std::vector<Field> same(3, smooth_run(100).final().u);
  EXPECT_THROW(self_convergence(same), InvalidArgument);
  std::vector<Field> nested;
  for (int n : {100, 200, 400}) nested.push_back(smooth_run(n).final().u);
  EXPECT_THROW(self_convergence(std::span<const Field>(nested.data(), 2)), InvalidArgument);
  const ConvergenceStudy s = self_convergence(nested);
  ASSERT_EQ(s.orders.size(), 1u);
  EXPECT_GT(s.order(), 0.5);

  std::vector<Field> flat(3);
  flat[0] = Field::zeros(make_grid(4.0, 8));
  flat[1] = Field::zeros(make_grid(4.0, 16));
  flat[2] = Field::zeros(make_grid(4.0, 32));
  EXPECT_THROW(self_convergence(flat), Error);
}

TEST(Analysis, RestrictionCommutesWithDistance) {
  // Restricting twice then comparing equals restricting the fine difference.
  const Field fine = smooth_run(400).final().u;
  const Field mid = smooth_run(200).final().u;
  Field diff = fine;
  const Field mid_up = [&] {
    Field up = fine;
    for (int i = 0; i < 400; ++i) up.values[static_cast<std::size_t>(i)] = mid.values[static_cast<std::size_t>(i / 2)];
    return up;
  }();
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= mid_up.values[i];
  const Field a = restrict_by_averaging(fine);
  Field b = restrict_by_averaging(diff);
  for (std::size_t i = 0; i < b.values.size(); ++i) b.values[i] += mid.values[i];
  EXPECT_NEAR(l1_distance(a, mid), l1_distance(b, mid), 1e-13);
}

TEST(Analysis, ObservedOrders) {
  const std::vector<double> e{1.0, 0.25, 0.0625};
  const auto p = observed_orders(e);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p[0], 2.0);
  EXPECT_DOUBLE_EQ(p[1], 2.0);
}
