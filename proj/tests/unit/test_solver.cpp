#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <ohx/analysis.hpp>
#include <ohx/error.hpp>
#include <ohx/nonlocal.hpp>
#include <ohx/random.hpp>
#include <ohx/solver.hpp>

using namespace ohx;

namespace {

FluxModel burgers() {
  FluxSpec spec;
  spec.family = FluxFamily::burgers;
  return make_flux(spec);
}

FluxModel weighted() { return make_flux(FluxSpec{}); }

Field dipole(double x_max, int n, double scale = 1.0) {
  Field u = project_initial(profiles::GaussianDipole{5.0, 1.0}, make_grid(x_max, n), true);
  for (double& v : u.values) v *= scale;
  return u;
}

}  // namespace

TEST(Solver, ParseNames) {
  EXPECT_EQ(parse_numerical_flux("rusanov"), NumericalFlux::rusanov);
  EXPECT_EQ(parse_numerical_flux("engquist-osher"), NumericalFlux::engquist_osher);
  EXPECT_EQ(parse_integrator("ssp-rk3"), Integrator::ssp_rk3);
  EXPECT_THROW(parse_numerical_flux("godunov"), InvalidArgument);
}

TEST(Solver, EngquistOsherBurgersClosedForms) {
  const FluxModel f = burgers();
  EXPECT_DOUBLE_EQ(numerical_flux_value(f, 1.0, 1.0, -1.0, NumericalFlux::engquist_osher), 1.0);
  EXPECT_DOUBLE_EQ(numerical_flux_value(f, 1.0, -1.0, 1.0, NumericalFlux::engquist_osher), 0.0);
  EXPECT_DOUBLE_EQ(numerical_flux_value(f, 1.0, 2.0, 1.0, NumericalFlux::engquist_osher), 2.0);
  EXPECT_DOUBLE_EQ(numerical_flux_value(f, 1.0, -2.0, -1.0, NumericalFlux::engquist_osher), 0.5);
  // Rusanov: average minus max speed times half jump.
  EXPECT_DOUBLE_EQ(numerical_flux_value(f, 1.0, 1.0, -1.0, NumericalFlux::rusanov), 1.5);
}

TEST(Solver, NumericalFluxConsistencyAndMonotonicity) {
  const FluxModel f = weighted();
  CounterRng rng(17, 0);
  for (int k = 0; k < 1000; ++k) {
    const double x = rng.uniform(0.0, 30.0);
    const double u = rng.uniform(-8.0, 8.0);
    for (NumericalFlux kind : {NumericalFlux::engquist_osher, NumericalFlux::rusanov}) {
      EXPECT_NEAR(numerical_flux_value(f, x, u, u, kind), f.eval(x, u), 1e-13 * (1.0 + std::abs(f.eval(x, u))));
      const double v = rng.uniform(-8.0, 8.0);
      const double h = 1e-3;
      EXPECT_GE(numerical_flux_value(f, x, u + h, v, kind), numerical_flux_value(f, x, u, v, kind) - 1e-12);
      EXPECT_LE(numerical_flux_value(f, x, u, v + h, kind), numerical_flux_value(f, x, u, v, kind) + 1e-12);
    }
  }
}

TEST(Solver, SonicPoints) {
  const FluxModel f = weighted();
  const auto zs = sonic_points(f, 1.0, -1.0, 2.0);
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_NEAR(zs[0], 0.0, 1e-12);
  EXPECT_TRUE(sonic_points(f, 1.0, 0.5, 2.0).empty());

  FluxModel scan = f;
  scan.sonic_points = nullptr;
  const auto zs2 = sonic_points(scan, 2.0, -1.3, 0.7);
  ASSERT_EQ(zs2.size(), 1u);
  EXPECT_NEAR(zs2[0], 0.0, 1e-10);
}

TEST(Solver, ZeroIsSteady) {
  const Field zero = Field::zeros(make_grid(10.0, 100));
  for (NumericalFlux kind : {NumericalFlux::engquist_osher, NumericalFlux::rusanov}) {
    const Field r = semi_discrete_rhs(zero, weighted(), 0.1, kind);
    for (double v : r.values) EXPECT_EQ(v, 0.0);
  }
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.epsilon = 0.05;
  const RunHistory h = solve(zero, weighted(), cfg);
  EXPECT_NEAR(h.final().time(), 1.0, 1e-12);
  for (const auto& s : h.snapshots)
    for (double v : s.u.values) EXPECT_EQ(v, 0.0);
}

TEST(Solver, ZeroFluxTendencyIsPrimitive) {
  const Field u = dipole(10.0, 200);
  const Field r = semi_discrete_rhs(u, make_zero_flux(), 0.0, NumericalFlux::engquist_osher);
  const Primitive p = cumulative_primitive(u);
  for (std::size_t i = 0; i < r.values.size(); ++i) EXPECT_DOUBLE_EQ(r.values[i], p.values[i]);
}

TEST(Solver, TendencyTruncationOrder) {
  // u = sin(pi x / 4)^3 near x = 2: tendency = -u u_x + P.
  auto g = [](double x) { return std::pow(std::sin(std::numbers::pi * x / 4.0), 3); };
  auto gx = [](double x) {
    const double s = std::sin(std::numbers::pi * x / 4.0);
    return 3.0 * s * s * std::cos(std::numbers::pi * x / 4.0) * std::numbers::pi / 4.0;
  };
  std::vector<double> errors;
  for (int n : {100, 200, 400}) {
    Field u = Field::zeros(make_grid(4.0, n));
    for (int i = 0; i < n; ++i) u.values[static_cast<std::size_t>(i)] = g(u.grid.center(i));
    const Field r = semi_discrete_rhs(u, burgers(), 0.0, NumericalFlux::engquist_osher, false);
    double err = 0.0;
    for (int i = n / 4; i < 3 * n / 4; ++i) {
      const double x = u.grid.center(i);
      err = std::max(err, std::abs(r.values[static_cast<std::size_t>(i)] + g(x) * gx(x)));
    }
    errors.push_back(err);
  }
  for (double p : observed_orders(errors)) EXPECT_GE(p, 0.9);
}

TEST(Solver, StableDtCaps) {
  SolverConfig cfg;
  cfg.cfl = 0.9;
  EXPECT_DOUBLE_EQ(stable_dt(Field::zeros(make_grid(10.0, 100)), burgers(), cfg), 0.9 / 11.0);

  Field u = Field::zeros(make_grid(1000.0, 20000));
  u.values[7] = 2.0;
  cfg.cfl = 0.5;
  cfg.nonlocal_source = false;
  EXPECT_DOUBLE_EQ(stable_dt(u, burgers(), cfg), 0.5 * 0.05 / 2.0);

  cfg.epsilon = 0.1;
  u.values[7] = 0.01;
  EXPECT_DOUBLE_EQ(stable_dt(u, burgers(), cfg), 0.5 * 0.0125);
}

TEST(Solver, ConfigGuards) {
  SolverConfig cfg;
  cfg.cfl = 1.5;
  EXPECT_THROW(check_config(cfg), InvalidArgument);
  cfg.cfl = 0.5;
  cfg.epsilon = -1.0;
  EXPECT_THROW(check_config(cfg), InvalidArgument);
  cfg.epsilon = 0.0;
  cfg.t_end = 0.0;
  EXPECT_THROW(solve(dipole(10.0, 50), weighted(), cfg), InvalidArgument);
}

TEST(Solver, SnapshotsAndDeterminism) {
  SolverConfig cfg;
  cfg.t_end = 0.3;
  cfg.output_stride = 3;
  const Field u0 = dipole(30.0, 300, 0.2);
  const RunHistory a = solve(u0, weighted(), cfg);
  const RunHistory b = solve(u0, weighted(), cfg);
  EXPECT_EQ(a.snapshots.front().time(), 0.0);
  EXPECT_DOUBLE_EQ(a.final().time(), 0.3);
  EXPECT_EQ(a.snapshots.size(), (a.steps.size() + 2) / 3 + 1);
  ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) EXPECT_EQ(a.snapshots[k].u.values, b.snapshots[k].u.values);
}

TEST(Solver, BoxExitCarriesPartialHistory) {
  FluxSpec spec;
  spec.state_box_m = 0.5;
  SolverConfig cfg;
  cfg.t_end = 2.0;
  try {
    solve(dipole(30.0, 300, 0.45), make_flux(spec), cfg);
    FAIL() << "expected a fault";
  } catch (const SolverFault& f) {
    EXPECT_EQ(f.kind(), FaultKind::box_exit);
    ASSERT_TRUE(f.partial());
    EXPECT_GE(f.partial()->snapshots.size(), 1u);
    EXPECT_LT(f.partial()->final().time(), 2.0);
    for (double v : f.partial()->final().u.values) EXPECT_LE(std::abs(v), 0.5);
  }
  EXPECT_THROW(solve(dipole(30.0, 300, 0.9), make_flux(spec), cfg), SolverFault);
}

TEST(Solver, ZeroFluxSeriesOracle) {
  // u_t = P has u = sum_k t^k / k! I^k u0; iterate the exact primitive on a fine grid.
  const double T = 0.5;
  const int fine = 6400;
  const Grid fg = make_grid(10.0, fine);
  Field term = project_initial(profiles::GaussianDipole{5.0, 1.0}, fg, false);
  std::vector<double> exact = term.values;
  double coef = 1.0;
  for (int k = 1; k < 60; ++k) {
    term.values = cumulative_primitive(term).values;
    coef *= T / k;
    for (int i = 0; i < fine; ++i) exact[static_cast<std::size_t>(i)] += coef * term.values[static_cast<std::size_t>(i)];
  }
  std::vector<double> errors;
  for (int n : {100, 200, 400}) {
    SolverConfig cfg;
    cfg.t_end = T;
    cfg.cfl = 0.5 * 100.0 / n;
    const Field u0 = project_initial(profiles::GaussianDipole{5.0, 1.0}, make_grid(10.0, n), false);
    const RunHistory h = solve(u0, make_zero_flux(), cfg);
    Field reference = Field::zeros(fg);
    reference.values = exact;
    while (reference.grid.n() > n) reference = restrict_by_averaging(reference);
    errors.push_back(l1_distance(h.final().u, reference));
  }
  for (double p : observed_orders(errors)) EXPECT_GE(p, 1.8);
}

TEST(Solver, RankineHugoniotShock) {
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.nonlocal_source = false;
  const Grid g = make_grid(4.0, 200);
  const RunHistory h = solve(project_initial(profiles::RiemannStep{1.0, 1.0, 0.0, g.dx()}, g, false), burgers(), cfg);
  const auto& u = h.final().u.values;
  int i = g.n() - 2;
  while (!(u[static_cast<std::size_t>(i)] >= 0.5 && u[static_cast<std::size_t>(i + 1)] < 0.5)) --i;
  const double x = g.center(i) + g.dx() * (u[static_cast<std::size_t>(i)] - 0.5) /
                                     (u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(i + 1)]);
  EXPECT_NEAR(x, 1.5, 2.0 * g.dx());
}

TEST(Solver, EngquistOsherAndRusanovAgreeOnSmoothData) {
  std::vector<double> diffs;
  for (int n : {200, 400, 800}) {
    SolverConfig cfg;
    cfg.t_end = 0.3;
    const Field u0 = dipole(20.0, n, 0.3);
    const RunHistory eo = solve(u0, weighted(), cfg);
    cfg.numerical_flux = NumericalFlux::rusanov;
    const RunHistory ru = solve(u0, weighted(), cfg);
    diffs.push_back(l1_distance(eo.final().u, ru.final().u));
  }
  for (double p : observed_orders(diffs)) EXPECT_GE(p, 0.9);
}

TEST(Solver, ConservativeWithoutSource) {
  // Flux differences telescope; with the source off the mean only moves by
  // the boundary flux of the e^-25 tail at x = 0.
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.epsilon = 0.01;
  cfg.nonlocal_source = false;
  for (NumericalFlux kind : {NumericalFlux::engquist_osher, NumericalFlux::rusanov}) {
    cfg.numerical_flux = kind;
    const RunHistory h = solve(dipole(20.0, 400), burgers(), cfg);
    for (const auto& s : h.steps) EXPECT_LT(std::abs(s.mean), 1e-10);
  }
}

TEST(Solver, ViscositySweep) {
  SolverConfig cfg;
  cfg.t_end = 0.2;
  const Field u0 = dipole(20.0, 200, 0.3);
  const std::vector<double> same{0.05, 0.05};
  const SweepReport s = viscosity_sweep(u0, weighted(), cfg, same);
  ASSERT_EQ(s.successive.size(), 1u);
  EXPECT_EQ(s.successive[0], 0.0);

  const std::vector<double> single{0.0};
  const SweepReport one = viscosity_sweep(u0, weighted(), cfg, single);
  EXPECT_EQ(one.runs.size(), 1u);
  EXPECT_TRUE(one.successive.empty());

  const std::vector<double> list{0.1, 0.05, 0.025, 0.0};
  const SweepReport trend = viscosity_sweep(u0, weighted(), cfg, list);
  ASSERT_EQ(trend.successive.size(), 3u);
  EXPECT_GT(trend.successive[0], trend.successive[1]);
  EXPECT_EQ(trend.to_inviscid.size(), 3u);

  const std::vector<double> rising{0.01, 0.1};
  EXPECT_THROW(viscosity_sweep(u0, weighted(), cfg, rising), InvalidArgument);
}
