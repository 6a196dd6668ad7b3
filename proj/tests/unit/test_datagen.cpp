#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "slcomm/datagen.hpp"
#include "slcomm/errors.hpp"

using namespace slcomm;

namespace {

std::size_t first_off_support(const DenseVector& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) return i;
  }
  return 0;
}

void expect_norm_bound(const ProblemInstance& inst, int samples, bool exact) {
  auto sampler = inst.sampler(77);
  Example ex;
  const double q = inst.info().q;
  const bool linf = inst.info().name == "hide_and_seek";
  for (int k = 0; k < samples; ++k) {
    sampler->next(ex);
    const double n = linf ? lp_norm(ex.x, LpOrder::infinity()) : lp_norm(ex.x, q);
    if (exact) {
      ASSERT_NEAR(n, inst.info().feature_norm, 1e-12);
    } else {
      ASSERT_LE(n, inst.info().feature_norm * (1 + 1e-12));
    }
  }
}

}  // namespace

TEST(GenL1Lq, OptimumAndNormBound) {
  for (FeatureLaw law : {FeatureLaw::sphere, FeatureLaw::signal_block}) {
    L1LqOptions o;
    o.dim = 300;
    o.q = 3.0;
    o.law = law;
    const auto inst = gen_l1lq(o, 1);
    EXPECT_NEAR(lp_norm(inst->optimum(), 1.0), o.radius / 2, 1e-12);
    EXPECT_NEAR(inst->excess_risk(inst->optimum()), 0.0, 1e-15);
    expect_norm_bound(*inst, 20000, true);
  }
}

TEST(GenL1Lq, ClosedFormMatchesMonteCarlo) {
  L1LqOptions o;
  o.dim = 40;
  o.q = 2.0;
  const auto inst = gen_l1lq(o, 2);
  const std::vector<double> sigma = inst->second_moments();
  ASSERT_EQ(sigma.size(), o.dim);
  const double delta = 0.3;
  const DenseVector probe = inst->optimum() + delta * DenseVector::unit(o.dim, 0);
  EXPECT_NEAR(inst->excess_risk(probe), sigma[0] * delta * delta, 1e-14);
  const HoldoutEstimate h = holdout_risk(*inst, probe, 1000000, 3);
  EXPECT_LE(std::fabs(h.mean - *inst->closed_form_risk(probe)), 3 * h.standard_error);
  EXPECT_NEAR(sigma[0], lq_sphere_second_moment(o.dim, 2.0), 1e-15);
  EXPECT_NEAR(lq_sphere_second_moment(o.dim, 2.0), 1.0 / 40.0, 1e-15);
}

TEST(GenL1Lq, LqSphereSecondMomentMatchesSampling) {
  CounterRng rng(4);
  std::vector<double> u(12);
  std::vector<double> first(200000);
  for (double& f : first) {
    sample_lq_sphere(u, 3.0, rng);
    f = u[0] * u[0];
  }
  const auto m = oracle::mean_se(first);
  EXPECT_LE(std::fabs(m.mean - lq_sphere_second_moment(12, 3.0)), 3 * m.se);
}

TEST(GenSparseRegression, ClosedForm) {
  SparseRegressionOptions o;
  o.dim = 128;
  const auto inst = gen_sparse_regression(o, 5);
  const InstanceInfo& info = inst->info();
  EXPECT_NEAR(info.radius, o.sparsity * o.magnitude, 1e-15);
  EXPECT_NEAR(info.rsc, 1.0 / (4.0 * static_cast<double>(o.sparsity)), 1e-15);
  EXPECT_EQ(count_nonzero(inst->optimum().span()), o.sparsity);
  EXPECT_NEAR(inst->excess_risk(inst->optimum()), 0.0, 1e-15);
  const std::size_t j = first_off_support(inst->optimum());
  EXPECT_NEAR(inst->excess_risk(inst->optimum() + 0.25 * DenseVector::unit(o.dim, j)), 0.0625, 1e-14);
  expect_norm_bound(*inst, 10000, true);
  const DenseVector probe = inst->optimum() + 0.1 * DenseVector::unit(o.dim, j);
  const HoldoutEstimate h = holdout_risk(*inst, probe, 1000000, 6);
  EXPECT_LE(std::fabs(h.mean - *inst->closed_form_risk(probe)), 3 * h.standard_error);
}

TEST(GenHideAndSeek, CoordinateMeans) {
  HideAndSeekOptions o;
  o.dim = 8;
  o.bias = 0.3;
  o.hidden = 5;
  const auto inst = gen_hide_and_seek(o);
  auto sampler = inst->sampler(7);
  Example ex;
  std::vector<std::vector<double>> cols(o.dim, std::vector<double>(100000));
  for (int k = 0; k < 100000; ++k) {
    sampler->next(ex);
    for (std::size_t i = 0; i < o.dim; ++i) cols[i][k] = ex.x[i];
  }
  for (std::size_t i = 0; i < o.dim; ++i) {
    const auto m = oracle::mean_se(cols[i]);
    const double expected = i == o.hidden ? 2 * o.bias : 0.0;
    EXPECT_LE(std::fabs(m.mean - expected), 3 * m.se) << "coordinate " << i;
  }
  EXPECT_NEAR(inst->risk(DenseVector::unit(o.dim, o.hidden)), -2 * o.bias, 1e-15);
  EXPECT_EQ(inst->optimum(), DenseVector::unit(o.dim, o.hidden));
}

TEST(GenL2L2, ThreeShapes) {
  L2L2Options o;
  o.dim = 30;
  const auto inst = gen_l2l2(o, 8);
  EXPECT_NEAR(lp_norm(inst->optimum(), 2.0), o.radius / 2, 1e-12);
  EXPECT_NEAR(inst->excess_risk(inst->optimum()), 0.0, 1e-15);
  expect_norm_bound(*inst, 10000, true);
  const DenseVector probe = inst->optimum() + 0.2 * DenseVector::unit(o.dim, 1);
  const HoldoutEstimate h = holdout_risk(*inst, probe, 1000000, 9);
  EXPECT_LE(std::fabs(h.mean - *inst->closed_form_risk(probe)), 3 * h.standard_error);
}

TEST(GenMatrix, RiskAndSpectralBound) {
  MatrixOptions o;
  o.dim = 6;
  const auto inst = gen_matrix_s1sq(o, 10);
  EXPECT_NEAR(schatten_norm(inst->optimum(), 1.0), o.radius / 2, 1e-12);
  EXPECT_NEAR(inst->excess_risk(inst->optimum()), 0.0, 1e-15);
  auto sampler = inst->sampler(11);
  MatrixExample ex;
  DenseMatrix probe = inst->optimum();
  probe(0, 1) += 0.3;
  probe(2, 2) -= 0.2;
  std::vector<double> losses(400000);
  for (double& l : losses) {
    sampler->next(ex);
    ASSERT_NEAR(schatten_norm(ex.x, o.q), o.feature_norm, 1e-9);
    l = loss(inst->link(), probe, ex);
  }
  const auto m = oracle::mean_se(losses);
  EXPECT_LE(std::fabs(m.mean - inst->risk(probe)), 3 * m.se);
}

TEST(Generators, StreamsAreReproducible) {
  L1LqOptions o;
  o.dim = 50;
  const auto a = gen_l1lq(o, 12);
  const auto b = gen_l1lq(o, 12);
  EXPECT_EQ(a->optimum(), b->optimum());
  auto sa = a->sampler(13);
  auto sb = b->sampler(13);
  Example ea, eb;
  for (int k = 0; k < 1000; ++k) {
    sa->next(ea);
    sb->next(eb);
    ASSERT_EQ(ea.x, eb.x);
    ASSERT_EQ(ea.y, eb.y);
  }
}

TEST(Generators, OptimumBeatsProbePoints) {
  L1LqOptions o;
  o.dim = 20;
  o.link = LinkFunction::absolute();
  const auto inst = gen_l1lq(o, 14);
  CounterRng rng(15);
  const double best = inst->risk(inst->optimum());
  // each risk call is a 10^6-example holdout with shared randomness
  for (int k = 0; k < 10; ++k) {
    DenseVector w(o.dim);
    for (double& x : w) x = rng.normal();
    w *= o.radius * rng.uniform01() / lp_norm(w, 1.0);
    EXPECT_LE(best, inst->risk(w) + 1e-12);
  }
}

TEST(Generators, RejectInvalidOptions) {
  L1LqOptions o;
  o.q = 1.5;
  EXPECT_THROW(gen_l1lq(o, 1), InvalidParameter);
  HideAndSeekOptions h;
  h.bias = 0.7;
  EXPECT_THROW(gen_hide_and_seek(h), InvalidParameter);
  SparseRegressionOptions s;
  s.sparsity = s.dim + 1;
  EXPECT_THROW(gen_sparse_regression(s, 1), InvalidParameter);
}
