#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "slcomm/errors.hpp"
#include "slcomm/mirror.hpp"
#include "slcomm/rng.hpp"

using namespace slcomm;

namespace {

DenseVector seeded(std::size_t d, CounterRng& rng, double scale = 1.0) {
  DenseVector v(d);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

double half_sq_pnorm(const std::vector<double>& w, double p) {
  const double n = oracle::lp_norm(w, p);
  return 0.5 * n * n;
}

/// Minimum of D(w || y) over the l1 sphere of radius 1 in three dimensions
/// on a lattice of roughly 10^6 points.
double grid_minimum(const MirrorMap& map, const DenseVector& y) {
  constexpr int kSteps = 700;
  double best = std::numeric_limits<double>::infinity();
  DenseVector w(3);
  for (int i = -kSteps; i <= kSteps; ++i) {
    const double a = static_cast<double>(i) / kSteps;
    const int rest = kSteps - std::abs(i);
    for (int j = -rest; j <= rest; ++j) {
      const double b = static_cast<double>(j) / kSteps;
      const double c = 1.0 - std::fabs(a) - std::fabs(b);
      for (double sign : {-1.0, 1.0}) {
        w[0] = a;
        w[1] = b;
        w[2] = sign * c;
        best = std::min(best, bregman(map, w, y));
        if (c == 0.0) break;
      }
    }
  }
  return best;
}

}  // namespace

TEST(MirrorMap, RejectsOutOfRangeExponent) {
  EXPECT_THROW(MirrorMap::at_origin(1.0, 3), InvalidParameter);
  EXPECT_THROW(MirrorMap::at_origin(2.5, 3), InvalidParameter);
  EXPECT_THROW(L1Ball(0.0), InvalidParameter);
  const MirrorMap m = MirrorMap::from_dual_exponent(3.0, DenseVector(2));
  EXPECT_DOUBLE_EQ(m.q(), 3.0);
  EXPECT_DOUBLE_EQ(m.p(), 1.5);
}

TEST(GradReg, QuadraticCaseIsIdentity) {
  CounterRng rng(1);
  const MirrorMap map = MirrorMap::at_origin(2.0, 5);
  const DenseVector w = seeded(5, rng);
  EXPECT_EQ(grad_reg(map, w), w);
  EXPECT_EQ(inv_grad_reg(map, w), w);
}

TEST(GradReg, UnitOffsetFromCenter) {
  CounterRng rng(2);
  const DenseVector center = seeded(4, rng);
  for (double p : {1.2, 1.5, 2.0}) {
    const MirrorMap map(p, center);
    const DenseVector g = grad_reg(map, center + DenseVector::unit(4, 0));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(g[i], i == 0 ? 1.0 : 0.0, 1e-12);
    EXPECT_EQ(grad_reg(map, center), DenseVector(4));
    const DenseVector back = inv_grad_reg(map, DenseVector::unit(4, 0));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(back[i], center[i] + (i == 0 ? 1.0 : 0.0), 1e-12);
  }
}

TEST(GradReg, MatchesFiniteDifferences) {
  const MirrorMap map = MirrorMap::at_origin(1.5, 2);
  const DenseVector w{1.0, -2.0};
  const DenseVector g = grad_reg(map, w);
  const auto fd = oracle::numeric_gradient([](const std::vector<double>& x) { return half_sq_pnorm(x, 1.5); },
                                           {1.0, -2.0});
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(g[i], fd[i], 1e-4);
}

TEST(InvGradReg, RoundTrip) {
  CounterRng rng(3);
  for (int c = 0; c < 100; ++c) {
    const MirrorMap map = MirrorMap::from_dual_exponent(3.0, c % 2 == 0 ? DenseVector(8) : seeded(8, rng));
    const DenseVector y = seeded(8, rng);
    const DenseVector back = grad_reg(map, inv_grad_reg(map, y));
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(back[i], y[i], 1e-8 * (1.0 + std::fabs(y[i])));
  }
}

TEST(Bregman, Examples) {
  CounterRng rng(4);
  const MirrorMap quad = MirrorMap::at_origin(2.0, 6);
  const DenseVector a = seeded(6, rng);
  const DenseVector b = seeded(6, rng);
  const double d2 = lp_norm(a - b, 2.0);
  EXPECT_NEAR(bregman(quad, a, b), 0.5 * d2 * d2, 1e-12);
  const MirrorMap map = MirrorMap::at_origin(1.5, 6);
  EXPECT_EQ(bregman(map, a, a), 0.0);
  const double dp = lp_norm(a - b, 1.5);
  EXPECT_GE(bregman(map, a, b), 0.25 * dp * dp - 1e-12);
}

TEST(BregmanProject, InteriorPointUnchanged) {
  const MirrorMap map = MirrorMap::at_origin(1.5, 3);
  const DenseVector theta = grad_reg(map, DenseVector{0.1, -0.2, 0.3});
  const DenseVector w = bregman_project(map, L1Ball(1.0), theta);
  const DenseVector expected = inv_grad_reg(map, theta);
  EXPECT_EQ(w, expected);
}

TEST(BregmanProject, EuclideanMatchesSortOracle) {
  CounterRng rng(5);
  for (int c = 0; c < 200; ++c) {
    const std::size_t d = 1 + rng.uniform_index(100);
    const MirrorMap map = MirrorMap::at_origin(2.0, d);
    const DenseVector theta = seeded(d, rng, 0.5);
    const double radius = 0.1 + rng.uniform01();
    const DenseVector w = bregman_project(map, L1Ball(radius), theta);
    const auto expected = oracle::project_l1_sort(theta.values(), radius);
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(w[i], expected[i], 1e-8);
  }
}

TEST(BregmanProject, GeneralExponentMatchesGridSearch) {
  CounterRng rng(6);
  for (int c = 0; c < 3; ++c) {
    const MirrorMap map = MirrorMap::at_origin(1.5, 3);
    const DenseVector theta = seeded(3, rng, 2.0);
    const DenseVector y = inv_grad_reg(map, theta);
    ASSERT_GT(lp_norm(y, 1.0), 1.0);
    const DenseVector w = bregman_project(map, L1Ball(1.0), theta);
    EXPECT_NEAR(lp_norm(w, 1.0), 1.0, 1e-9);
    const double grid = grid_minimum(map, y);
    EXPECT_LE(bregman(map, w, y), grid + 1e-12);
    EXPECT_GE(bregman(map, w, y), grid - 1e-3);
  }
}

TEST(BregmanProject, ShiftedCenterMatchesGridSearch) {
  CounterRng rng(7);
  for (int c = 0; c < 3; ++c) {
    const DenseVector center{0.3 * rng.normal(), 0.2 * rng.normal(), 0.1};
    const MirrorMap map(1.5, center);
    const DenseVector theta = seeded(3, rng, 2.0);
    const DenseVector y = inv_grad_reg(map, theta);
    ASSERT_GT(lp_norm(y, 1.0), 1.0);
    const ProjectedPoint proj = bregman_project_with_dual(map, L1Ball(1.0), theta);
    EXPECT_NEAR(lp_norm(proj.primal, 1.0), 1.0, 1e-9);
    const DenseVector g = grad_reg(map, proj.primal);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(proj.dual[i], g[i], 1e-8);
    const double grid = grid_minimum(map, y);
    // the multiplier search stops up to 1e-9 relative inside the sphere
    EXPECT_LE(bregman(map, proj.primal, y), grid + 1e-8 * (1.0 + grid));
    EXPECT_GE(bregman(map, proj.primal, y), grid - 1e-3);
  }
}

TEST(MdStep, Examples) {
  CounterRng rng(8);
  const MirrorMap map = MirrorMap::at_origin(1.5, 5);
  const L1Ball ball(1.0);
  const DenseVector w{0.1, -0.1, 0.2, 0.0, 0.05};
  const DenseVector back = md_step(map, ball, w, DenseVector(5), 0.1);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(back[i], w[i], 1e-12);

  const MirrorMap quad = MirrorMap::at_origin(2.0, 5);
  const DenseVector g{0.1, 0.2, -0.1, 0.0, 0.3};
  const DenseVector step = md_step(quad, ball, w, g, 0.1);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(step[i], w[i] - 0.1 * g[i], 1e-15);

  // f(w) = 1/2 ||w - target||_2^2
  const DenseVector target = seeded(5, rng, 0.1);
  auto f = [&](const DenseVector& v) {
    const double n = lp_norm(v - target, 2.0);
    return 0.5 * n * n;
  };
  const DenseVector next = md_step(map, ball, w, w - target, 1e-3);
  EXPECT_LT(f(next), f(w));
}

TEST(BregmanProject, CenterOnSphereStillMoves) {
  // After a restart the center is itself a point of the sphere, and a large
  // dual step must still pull the projection away from it.
  const DenseVector center{0.6, -0.4, 0.0};
  const MirrorMap map(1.5, center);
  const DenseVector theta{-3.0, 0.5, 2.0};
  const DenseVector y = inv_grad_reg(map, theta);
  ASSERT_GT(lp_norm(y, 1.0), 1.0);
  const DenseVector w = bregman_project(map, L1Ball(1.0), theta);
  EXPECT_GT(lp_norm(w - center, 2.0), 0.1);
  EXPECT_NEAR(lp_norm(w, 1.0), 1.0, 1e-9);
  const double grid = grid_minimum(map, y);
  EXPECT_LE(bregman(map, w, y), grid + 1e-8 * (1.0 + grid));
  EXPECT_GE(bregman(map, w, y), grid - 1e-3);
}
