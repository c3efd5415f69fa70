#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hedgehog/diagnostics.hpp"
#include "hedgehog/minimize.hpp"
#include "hedgehog/profile.hpp"
#include "hedgehog/shooting.hpp"

using namespace hedgehog;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Ten-point Gauss-Legendre rule on [lo, hi]; exact for polynomials of degree <= 19.
template <class F>
double gauss_legendre(F f, double lo, double hi) {
  static const double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                              0.9739065285171717};
  static const double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                              0.0666713443086881};
  const double c = 0.5 * (lo + hi), s = 0.5 * (hi - lo);
  double acc = 0.0;
  for (int k = 0; k < 5; ++k) acc += w[k] * (f(c + s * x[k]) + f(c - s * x[k]));
  return s * acc;
}

RadialProfile ramp(const RadialGrid& grid, double t) {
  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = h_plus(t) * grid[i] / grid.R();
  return RadialProfile(grid, h);
}

}  // namespace

TEST(Grid, Validation) {
  EXPECT_THROW(RadialGrid::uniform(1.0, 16), std::invalid_argument);
  EXPECT_NO_THROW(RadialGrid::uniform(1.0, 17));
  EXPECT_THROW(RadialGrid::uniform(0.0, 64), std::invalid_argument);
  std::vector<double> bad(20);
  for (std::size_t i = 0; i < bad.size(); ++i) bad[i] = 0.1 * static_cast<double>(i) + 0.1;
  EXPECT_THROW(RadialGrid{bad}, std::invalid_argument);
  bad.front() = 0.0;
  bad[5] = bad[4];
  EXPECT_THROW(RadialGrid{bad}, std::invalid_argument);
}

TEST(Grid, GeometricClustering) {
  const auto g = RadialGrid::geometric(10.0, 101, 1.02);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g.R(), 10.0);
  EXPECT_NEAR(g.spacing(1) / g.spacing(0), 1.02, 1e-12);
  EXPECT_NEAR(g.spacing(99) / g.spacing(98), 1.02, 1e-10);
  const auto u = RadialGrid::geometric(3.0, 33, 1.0);
  const auto v = RadialGrid::uniform(3.0, 33);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], v[i], 1e-14);
}

TEST(Profile, FiniteDifferenceDerivativeExactForQuadratics) {
  const auto grid = RadialGrid::geometric(2.0, 40, 1.05);
  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 + 2.0 * grid[i] - 0.7 * grid[i] * grid[i];
  const RadialProfile p(grid, h);
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(p.h1()[i], 2.0 - 1.4 * grid[i], 1e-11);
  EXPECT_NEAR(p.boundary_slope(), 2.0 - 2.8, 1e-11);
}

TEST(OdeRhs, Example) {
  EXPECT_DOUBLE_EQ(ode_rhs(1.0, 1.0, 0.0, 1.0), 6.0);
  EXPECT_DOUBLE_EQ(ode_rhs(2.0, 1.0, 1.0, -1.0), -2.0 - 1.0 + 1.5);
  EXPECT_THROW(ode_rhs(0.0, 1.0, 0.0, 1.0), std::domain_error);
}

TEST(Energy, ZeroProfileIsTrapezoidOfOffset) {
  const double t = -2.0, R = 3.0;
  const auto grid = RadialGrid::uniform(R, 61);
  const double dr = R / 60.0;
  const RadialProfile zero(grid, std::vector<double>(grid.size(), 0.0));
  const double C = bulk_offset(t);
  EXPECT_NEAR(energy(zero, t), C * R * R * R / 3.0 + C * R * dr * dr / 6.0, 1e-12 * C * R * R * R);
}

TEST(Energy, RampConvergesAtSecondOrder) {
  const double t = 1.0, R = 2.0;
  auto density = [&](double r) {
    const double h = h_plus(t) * r / R, h1 = h_plus(t) / R;
    return 0.5 * r * r * h1 * h1 + 3.0 * h * h + r * r * g(h, t);
  };
  const double exact = gauss_legendre(density, 0.0, R);
  double prev = 0.0;
  for (std::size_t n : {65, 129, 257}) {
    const auto grid = RadialGrid::uniform(R, n);
    const double err = std::abs(energy(ramp(grid, t), t) - exact);
    const double dr = R / static_cast<double>(n - 1);
    EXPECT_LE(err, 2.0 * dr * dr);
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.2);
    prev = err;
  }
}

TEST(Energy, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  const double t = -1.0;
  const auto grid = RadialGrid::uniform(5.0, 65);
  for (int trial = 0; trial < 5; ++trial) {
    auto h = ramp(grid, t).h();
    for (std::size_t i = 1; i + 1 < h.size(); ++i) h[i] += noise(rng);
    const RadialProfile p(grid, h);
    const auto grad = discrete_gradient(p, t);
    ASSERT_EQ(grad.size(), grid.size() - 2);
    double max_err = 0.0, max_grad = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      const double step = 1e-6;
      auto hp = h, hm = h;
      hp[k + 1] += step;
      hm[k + 1] -= step;
      const double fd = (energy(RadialProfile(grid, hp), t) - energy(RadialProfile(grid, hm), t)) / (2 * step);
      max_err = std::max(max_err, std::abs(fd - grad[k]));
      max_grad = std::max(max_grad, std::abs(grad[k]));
    }
    EXPECT_LE(max_err / max_grad, 1e-6);
  }
}

TEST(SecondVariation, MatchesGradientDirectionalDerivative) {
  const double t = -3.0;
  const auto grid = RadialGrid::uniform(4.0, 41);
  const RadialProfile p = ramp(grid, t);
  const auto psis = random_test_functions(grid, 4, 9);
  const DiscreteEnergy E(grid, t);
  for (const auto& psi : psis) {
    const double step = 1e-5;
    auto hp = p.h(), hm = p.h();
    for (std::size_t i = 0; i < psi.size(); ++i) {
      hp[i] += step * psi[i];
      hm[i] -= step * psi[i];
    }
    const auto gp = E.gradient(hp), gm = E.gradient(hm);
    double fd = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) fd += (gp[i] - gm[i]) / (2 * step) * psi[i];
    EXPECT_NEAR(second_variation(p, psi, t), fd, 1e-6);
  }
}

TEST(SecondVariation, Examples) {
  const auto grid = RadialGrid::uniform(2.0, 21);
  const RadialProfile p = ramp(grid, -1.0);
  EXPECT_EQ(second_variation(p, std::vector<double>(grid.size(), 0.0), -1.0), 0.0);
  std::vector<double> psi(grid.size(), 0.0);
  psi.back() = 1.0;
  EXPECT_THROW(second_variation(p, psi, -1.0), std::invalid_argument);
  EXPECT_THROW(second_variation(p, std::vector<double>(5, 0.0), -1.0), std::invalid_argument);
  // Zero profile at t < 0: the bulk curvature t makes wide interior bumps unstable.
  const RadialGrid big = RadialGrid::uniform(20.0, 201);
  const RadialProfile zero(big, std::vector<double>(big.size(), 0.0));
  std::vector<double> bump(big.size(), 0.0);
  for (std::size_t i = 1; i + 1 < big.size(); ++i) bump[i] = std::sin(M_PI * big[i] / 20.0);
  EXPECT_LT(second_variation(zero, bump, -5.0), 0.0);
}

TEST(Minimize, RespectsBoundsAndBoundaryData) {
  const double t = -1.0;
  const auto grid = RadialGrid::uniform(5.0, 129);
  const auto p = minimize_energy(t, grid);
  EXPECT_EQ(p.h().front(), 0.0);
  EXPECT_EQ(p.h().back(), h_plus(t));
  for (double v : p.h()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, h_plus(t));
  }
  EXPECT_EQ(p.meta().solver, "minimization");
  EXPECT_LE(energy(p, t), energy(ramp(grid, t), t));
}

TEST(Minimize, FixedPointReturnsImmediately) {
  const double t = -1.0;
  const auto grid = RadialGrid::uniform(5.0, 129);
  const auto p = minimize_energy(t, grid);
  const auto q = minimize_energy(t, grid, p);
  EXPECT_EQ(q.meta().iterations, 0);
  EXPECT_EQ(q.h(), p.h());
}

TEST(Minimize, Errors) {
  const auto grid = RadialGrid::uniform(10.0, 129);
  EXPECT_THROW(minimize_energy(1.0, grid), std::domain_error);
  MinimizeOptions opt;
  opt.max_iters = 1;
  try {
    minimize_energy(-8.0, grid, std::nullopt, opt);
    FAIL() << "expected MinimizationError";
  } catch (const MinimizationError& e) {
    EXPECT_EQ(e.iterations(), 1);
    EXPECT_GT(e.gradient_norm(), opt.tol);
  }
  const auto other = RadialGrid::uniform(10.0, 65);
  EXPECT_THROW(minimize_energy(-8.0, grid, ramp(other, -8.0)), std::invalid_argument);
}

TEST(Minimize, SatisfiesStencilOnUniformGrid) {
  const double t = -8.0;
  const auto p = minimize_energy(t, RadialGrid::uniform(10.0, 512));
  const auto res = ode_residual(p, t);
  EXPECT_LE(*std::max_element(res.begin(), res.end()), 1e-6);
}

TEST(Minimize, ResidualDecaysOnClusteredGrids) {
  // The stencil residual at fixed radii shrinks under refinement on nonuniform grids.
  const double t = -1.0, R = 5.0;
  double prev = 0.0;
  for (std::size_t n : {129, 257, 513}) {
    const auto p = minimize_energy(t, RadialGrid::geometric(R, n, std::pow(20.0, 1.0 / static_cast<double>(n - 2))));
    const auto res = ode_residual(p, t);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
      if (p.r(i) >= 0.5) worst = std::max(worst, res[i - 1]);
    }
    if (prev > 0.0) EXPECT_LT(worst, 0.6 * prev) << n;
    prev = worst;
  }
}

TEST(Shoot, ZeroParameterGivesZeroProfile) {
  const auto shot = shoot(-1.0, RadialGrid::uniform(5.0, 65), 0.0);
  for (double v : shot.profile.h()) EXPECT_EQ(v, 0.0);
}

TEST(Shoot, DivergesForLargeParameter) {
  try {
    shoot(-1.0, RadialGrid::uniform(5.0, 65), 1e3);
    FAIL() << "expected ShootingDivergence";
  } catch (const ShootingDivergence& e) {
    EXPECT_EQ(e.direction(), 1);
    EXPECT_LT(e.r(), 5.0);
  }
}

TEST(Shoot, FindParameterIsSelfConsistent) {
  const double t = -1.0;
  const auto grid = RadialGrid::uniform(5.0, 257);
  const auto res = find_shooting_param(t, grid, 1e-10);
  EXPECT_LE(res.endpoint_miss, 1e-10);
  EXPECT_LE(res.bracket.first, res.a_star);
  EXPECT_GE(res.bracket.second, res.a_star);
  EXPECT_EQ(res.profile.meta().solver, "shooting");
  const auto again = shoot(t, grid, res.a_star);
  EXPECT_NEAR(again.h_R, h_plus(t), 1e-10);
  EXPECT_TRUE(check_monotone(res.profile, 1e-8).ok);
  EXPECT_TRUE(check_bounds(res.profile, t, 1e-8).ok);
  EXPECT_GT(res.profile.boundary_slope(), 0.0);
}

TEST(Shoot, LargeDropletUsesMultipleShooting) {
  const double t = -8.0;
  const auto res = find_shooting_param(t, RadialGrid::uniform(10.0, 512), 1e-10);
  EXPECT_LE(res.endpoint_miss, 1e-10);
  EXPECT_LE(res.continuity_defect, 1e-8);
  EXPECT_TRUE(check_monotone(res.profile, 1e-8).ok);
}

TEST(Shoot, NoBracketBelowCap) {
  ShootingOptions opt;
  opt.kappa0 = 1e-6;
  opt.a_cap = 1e-3;
  EXPECT_THROW(find_shooting_param(-1.0, RadialGrid::uniform(5.0, 65), 1e-10, opt), NoBracketError);
  EXPECT_THROW(find_shooting_param(1.0, RadialGrid::uniform(5.0, 65), 1e-10), std::domain_error);
}

TEST(Shoot, SingleRootInLogScan) {
  EXPECT_EQ(count_shooting_roots(-1.0, 5.0, 1e-4, 1e3, 161), 1);
  EXPECT_EQ(count_shooting_roots(-8.0, 10.0, 1e-4, 1e3, 161), 1);
  EXPECT_THROW(count_shooting_roots(-1.0, 5.0, 0.0, 1.0, 10), std::invalid_argument);
}

TEST(DualSolver, AgreeAtSecondOrder) {
  for (double t : {-10.0, -1.0}) {
    for (double R : {2.0, 10.0}) {
      const auto grid = RadialGrid::uniform(R, 256);
      const auto shot = find_shooting_param(t, grid, 1e-10);
      const auto minimum = minimize_energy(t, grid);
      const double dr = grid.max_spacing();
      EXPECT_LE(sup_diff(shot.profile.h(), minimum.h()), std::max(1e-4, dr * dr)) << "t=" << t << " R=" << R;
    }
  }
}
