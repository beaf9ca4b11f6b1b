#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <ohx/error.hpp>
#include <ohx/grid.hpp>
#include <ohx/nonlocal.hpp>
#include <ohx/quadrature.hpp>

using namespace ohx;

namespace {

double l2(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s * f.grid.dx());
}

}  // namespace

TEST(Grid, Geometry) {
  const Grid g = make_grid(1.0, 4);
  EXPECT_DOUBLE_EQ(g.dx(), 0.25);
  EXPECT_EQ(g.centers(), (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
  EXPECT_DOUBLE_EQ(g.interface(4), 1.0);
  EXPECT_DOUBLE_EQ(make_grid(50.0, 800).dx(), 0.0625);
}

TEST(Grid, Degenerate) {
  EXPECT_THROW(make_grid(0.0, 4), InvalidArgument);
  EXPECT_THROW(make_grid(-1.0, 4), InvalidArgument);
  EXPECT_THROW(make_grid(1.0, 3), InvalidArgument);
  EXPECT_THROW(make_grid(std::nan(""), 10), InvalidArgument);
}

TEST(Grid, ProfilesEvaluate) {
  EXPECT_DOUBLE_EQ(evaluate_profile(profiles::GaussianDipole{5.0, 1.0}, 6.0), std::exp(-1.0));
  EXPECT_EQ(evaluate_profile(profiles::BoxDipole{}, 1.5), 1.0);
  EXPECT_EQ(evaluate_profile(profiles::BoxDipole{}, 2.5), -1.0);
  EXPECT_EQ(evaluate_profile(profiles::BoxDipole{}, 3.5), 0.0);
  EXPECT_EQ(evaluate_profile(profiles::RiemannStep{1.0, 2.0, -1.0, 0.0}, 0.5), 2.0);
  EXPECT_EQ(evaluate_profile(profiles::RiemannStep{1.0, 2.0, -1.0, 0.0}, 1.0), 0.5);
  EXPECT_EQ(evaluate_profile(profiles::SampleTable{{0.0, 1.0}, {0.0, 2.0}}, 0.25), 0.5);
  EXPECT_EQ(evaluate_profile(profiles::SampleTable{{0.0, 1.0}, {0.0, 2.0}}, 1.5), 0.0);
}

TEST(Grid, GaussianDipoleMeanBeforeEnforcement) {
  const Field u = project_initial(profiles::GaussianDipole{5.0, 1.0}, make_grid(20.0, 400), false);
  EXPECT_LT(std::abs(mean(u)), 1e-8);
  // Continuum mean by high-order quadrature is zero up to tails.
  const double continuum = integrate(
      [](double x) { return evaluate_profile(profiles::GaussianDipole{5.0, 1.0}, x); }, 0.0, 20.0, 64,
      std::vector<double>{2.5, 5.0, 7.5, 10.0});
  EXPECT_LT(std::abs(continuum), 1e-10);
}

TEST(Grid, EnforcementRemovesConstants) {
  const Field u = project_initial(profiles::SampleTable{{0.0, 100.0}, {1.0, 1.0}}, make_grid(10.0, 50), true);
  for (double v : u.values) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Grid, EnforcedMeanIsRounding) {
  profiles::RandomZeroMean r;
  r.seed = 3;
  const Field u = project_initial(r, make_grid(12.0, 300), true);
  double sup = 0.0;
  for (double v : u.values) sup = std::max(sup, std::abs(v));
  EXPECT_LE(std::abs(mean(u)), 1e-14 * (1.0 + sup));
}

TEST(Grid, RandomProfileIsSeeded) {
  profiles::RandomZeroMean a;
  a.seed = 11;
  profiles::RandomZeroMean b = a;
  const Grid g = make_grid(10.0, 100);
  EXPECT_EQ(project_initial(a, g, false).values, project_initial(b, g, false).values);
  b.seed = 12;
  EXPECT_NE(project_initial(a, g, false).values, project_initial(b, g, false).values);
}

TEST(Grid, MollifyZeroAndContraction) {
  const Grid g = make_grid(4.0, 400);
  const Field zero = Field::zeros(g);
  EXPECT_EQ(mollify_initial(zero, 0.2).values, zero.values);

  const Field box = project_initial(profiles::BoxDipole{1.0, 2.0, 3.0}, g, true);
  const Field smooth = mollify_initial(box, 0.2);
  EXPECT_LE(l2(smooth), l2(box));
  double jump = 0.0;
  for (std::size_t i = 1; i < smooth.values.size(); ++i)
    jump = std::max(jump, std::abs(smooth.values[i] - smooth.values[i - 1]));
  EXPECT_LT(jump, 0.2);

  // Direct convolution at 10x resolution.
  const double x = 1.05;
  const double direct =
      integrate([&](double y) { return bump((x - y) / 0.2) * evaluate_profile(profiles::BoxDipole{}, y); }, x - 0.2,
                x + 0.2, 16, std::vector<double>{1.0}) /
      integrate([](double z) { return bump(z / 0.2); }, -0.2, 0.2, 32);
  EXPECT_NEAR(smooth.values[105], direct, 0.05);

  EXPECT_THROW(mollify_initial(box, 0.001), InvalidArgument);
}

TEST(Grid, MollifyAtGridScaleLeavesSmoothData) {
  const Field u = project_initial(profiles::GaussianDipole{5.0, 1.0}, make_grid(20.0, 400), true);
  const Field v = mollify_initial(u, u.grid.dx());
  double diff = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) diff += std::pow(u.values[i] - v.values[i], 2);
  EXPECT_LT(std::sqrt(diff * u.grid.dx()), 1e-3 * l2(u));
}

TEST(Grid, RestrictionAveragesPairs) {
  Field fine = Field::zeros(make_grid(2.0, 8));
  for (int i = 0; i < 8; ++i) fine.values[static_cast<std::size_t>(i)] = i;
  const Field coarse = restrict_by_averaging(fine);
  EXPECT_EQ(coarse.grid.n(), 4);
  EXPECT_EQ(coarse.values, (std::vector<double>{0.5, 2.5, 4.5, 6.5}));
  EXPECT_DOUBLE_EQ(mean(coarse), mean(fine));
  EXPECT_THROW(restrict_by_averaging(Field::zeros(make_grid(1.0, 5))), InvalidArgument);
}

TEST(Grid, L1DistanceAndSupport) {
  const Grid g = make_grid(4.0, 4);
  Field a = Field::zeros(g);
  Field b = Field::zeros(g);
  b.values = {1.0, -1.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(l1_distance(a, b), 2.0);
  EXPECT_THROW(l1_distance(a, Field::zeros(make_grid(4.0, 8))), InvalidArgument);
  EXPECT_EQ(support_radius(a), 0.0);
  EXPECT_DOUBLE_EQ(support_radius(b), 1.5);
  EXPECT_DOUBLE_EQ(required_domain_length(10.0, 5.0, 2.0), 24.0);
}
