#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "slcomm/errors.hpp"
#include "slcomm/losses.hpp"
#include "slcomm/rng.hpp"

using namespace slcomm;

namespace {

Example seeded_example(std::size_t d, CounterRng& rng) {
  Example ex{DenseVector(d), rng.normal()};
  for (double& x : ex.x) x = rng.normal();
  return ex;
}

}  // namespace

TEST(Loss, Examples) {
  CounterRng rng(1);
  Example ex = seeded_example(4, rng);
  ex.y = 0.0;
  EXPECT_EQ(loss(LinkFunction::square(), DenseVector(4).span(), ex), 0.0);

  Example one{DenseVector{1.0, 0.0}, 1.0};
  EXPECT_EQ(loss(LinkFunction::hinge(), DenseVector{1.0, 5.0}.span(), one), 0.0);
  EXPECT_NEAR(loss(LinkFunction::logistic(), DenseVector(2).span(), one), std::log(2.0), 1e-15);
}

TEST(Subgradient, SquareMatchesFiniteDifferences) {
  CounterRng rng(2);
  for (int c = 0; c < 5; ++c) {
    const Example ex = seeded_example(6, rng);
    DenseVector w(6);
    for (double& x : w) x = rng.normal();
    DenseVector g(6);
    subgradient(LinkFunction::square(), w.span(), ex, g.span());
    const auto fd = oracle::numeric_gradient(
        [&](const std::vector<double>& v) { return loss(LinkFunction::square(), v, ex); }, w.values());
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(g[i], fd[i], 1e-4 * (1 + std::fabs(fd[i])));
  }
}

TEST(Subgradient, LogisticMatchesFiniteDifferences) {
  CounterRng rng(3);
  const Example ex{DenseVector{0.3, -1.2, 0.5}, -1.0};
  const DenseVector w{0.2, 0.1, -0.4};
  DenseVector g(3);
  subgradient(LinkFunction::logistic(), w.span(), ex, g.span());
  const auto fd = oracle::numeric_gradient(
      [&](const std::vector<double>& v) { return loss(LinkFunction::logistic(), v, ex); }, w.values());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g[i], fd[i], 1e-6);
}

TEST(Subgradient, KinksAndConstantCases) {
  const Example ex{DenseVector{1.0, 2.0}, 1.0};
  DenseVector g(2);
  subgradient(LinkFunction::hinge(), DenseVector{3.0, 0.0}.span(), ex, g.span());
  EXPECT_EQ(g, DenseVector(2));
  subgradient(LinkFunction::linear(), DenseVector{3.0, -1.0}.span(), ex, g.span());
  EXPECT_EQ(g, (DenseVector{-1.0, -2.0}));
  // absolute link at zero residual uses the zero subgradient
  subgradient(LinkFunction::absolute(), DenseVector{1.0, 0.0}.span(), ex, g.span());
  EXPECT_EQ(g, DenseVector(2));
}

TEST(LinkFunction, Metadata) {
  EXPECT_EQ(LinkFunction::from_name("logistic"), LinkFunction::logistic());
  EXPECT_THROW(LinkFunction::from_name("cubic"), InvalidParameter);
  EXPECT_DOUBLE_EQ(LinkFunction::square().smoothness(), 2.0);
  EXPECT_DOUBLE_EQ(LinkFunction::logistic().smoothness(), 0.25);
  EXPECT_TRUE(LinkFunction::square().smooth());
  EXPECT_FALSE(LinkFunction::hinge().smooth());
  EXPECT_THROW((void)LinkFunction::hinge().smoothness(), InvalidParameter);
}

TEST(SelfBound, SmoothLinksSatisfyInequality) {
  for (const LinkFunction& link : {LinkFunction::square(), LinkFunction::logistic()}) {
    CounterRng rng(4);
    const SelfBoundReport rep = smoothness_selfbound_check(link, rng, 3);
    EXPECT_EQ(rep.cases, 3U);
    EXPECT_TRUE(rep.passed);
    EXPECT_LE(rep.worst_ratio, 1.0);
  }
  CounterRng rng(5);
  EXPECT_THROW(smoothness_selfbound_check(LinkFunction::hinge(), rng), InvalidParameter);
}

TEST(Loss, ConvexAlongSegments) {
  CounterRng rng(6);
  for (const LinkFunction& link : {LinkFunction::square(), LinkFunction::logistic(), LinkFunction::hinge(),
                                   LinkFunction::absolute(), LinkFunction::linear()}) {
    for (int c = 0; c < 200; ++c) {
      Example ex = seeded_example(3, rng);
      ex.y = rng.rademacher();
      DenseVector a(3), b(3);
      for (double& x : a) x = rng.normal();
      for (double& x : b) x = rng.normal();
      const double t = rng.uniform01();
      const DenseVector mid = t * a + (1 - t) * b;
      EXPECT_LE(loss(link, mid.span(), ex),
                t * loss(link, a.span(), ex) + (1 - t) * loss(link, b.span(), ex) + 1e-12);
    }
  }
}

TEST(Loss, MatrixExampleUsesFrobeniusInnerProduct) {
  MatrixExample ex{DenseMatrix::identity(2), 1.0};
  DenseMatrix w(2);
  w(0, 0) = 0.5;
  w(1, 1) = 0.25;
  EXPECT_NEAR(loss(LinkFunction::square(), w, ex), 0.0625, 1e-15);
  DenseMatrix g(2);
  subgradient(LinkFunction::square(), w, ex, g);
  EXPECT_NEAR(g(0, 0), -0.5, 1e-15);
  EXPECT_NEAR(g(1, 1), -0.5, 1e-15);
  EXPECT_EQ(g(0, 1), 0.0);
}
