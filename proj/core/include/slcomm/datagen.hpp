#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slcomm/losses.hpp"
#include "slcomm/rng.hpp"
#include "slcomm/vecspace.hpp"

namespace slcomm {

/// How feature vectors are drawn.
enum class FeatureLaw {
  /// x = R u with u on the unit lq sphere (generalized-Gaussian normalization).
  sphere,
  /// x = R (a^{1/q} u_S, (1 - a)^{1/q} u_rest): the support S of the optimum
  /// and its complement each get an independent unit-sphere draw, so a fixed
  /// fraction a of the lq mass always lands on S.
  signal_block,
  /// Independent +-1 coordinates scaled to ||x||_q = R.
  rademacher,
};

FeatureLaw feature_law_from_name(const std::string& name);
std::string feature_law_name(FeatureLaw law);

/// Constants describing an instance, consumed by the default parameter rules.
struct InstanceInfo {
  std::string name;
  std::size_t dim = 0;
  double q = 2.0;
  /// Radius B of the l1 (or l2, S_1) constraint set.
  double radius = 1.0;
  /// Exact value of ||x||_q (S_q norm for matrices) for every example.
  double feature_norm = 1.0;
  /// Bound on ||grad l||_q over the constraint set.
  double gradient_bound = 1.0;
  /// Noise half-width of the label noise (uniform on [-noise, noise]).
  double noise = 0.0;
  /// Risk of the optimum, L*.
  double optimal_risk = 0.0;
  /// Smoothness of the risk w.r.t. ||.||_p: beta_phi * feature_norm^2.
  double smoothness = 0.0;
  /// Restricted strong convexity modulus (0 when not applicable).
  double rsc = 0.0;
  std::size_t sparsity = 0;
};

/// Stream of i.i.d. examples from an instance's distribution.
class ExampleSampler {
 public:
  virtual ~ExampleSampler() = default;
  /// Overwrites out; out.x is resized on first use and reused afterwards.
  virtual void next(Example& out) = 0;
};

class ProblemInstance {
 public:
  virtual ~ProblemInstance() = default;

  [[nodiscard]] const InstanceInfo& info() const noexcept { return info_; }
  [[nodiscard]] const LinkFunction& link() const noexcept { return link_; }
  [[nodiscard]] const DenseVector& optimum() const noexcept { return optimum_; }
  [[nodiscard]] std::size_t dim() const noexcept { return info_.dim; }

  [[nodiscard]] virtual std::unique_ptr<ExampleSampler> sampler(std::uint64_t seed) const = 0;
  /// Exact population risk when available.
  [[nodiscard]] virtual std::optional<double> closed_form_risk(const DenseVector& w) const;
  /// Diagonal of E[x x^T] when features are uncorrelated (empty otherwise).
  [[nodiscard]] virtual std::vector<double> second_moments() const { return {}; }

  /// Closed form when available, else a 10^6-example holdout estimate.
  [[nodiscard]] double risk(const DenseVector& w) const;
  [[nodiscard]] double excess_risk(const DenseVector& w) const;

 protected:
  ProblemInstance(InstanceInfo info, LinkFunction link, DenseVector optimum)
      : info_(std::move(info)), link_(link), optimum_(std::move(optimum)) {}

  InstanceInfo info_;
  LinkFunction link_;
  DenseVector optimum_;
};

struct HoldoutEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

HoldoutEstimate holdout_risk(const ProblemInstance& instance, const DenseVector& w,
                             std::size_t samples, std::uint64_t seed);

/// Draw from the unit lq sphere in `out` (every entry overwritten).
void sample_lq_sphere(std::span<double> out, double q, CounterRng& rng);
/// E[u_i^2] for u drawn by sample_lq_sphere in dimension n.
double lq_sphere_second_moment(std::size_t n, double q);

struct L1LqOptions {
  std::size_t dim = 1000;
  double radius = 1.0;
  double feature_norm = 1.0;
  double q = 2.0;
  LinkFunction link = LinkFunction::square();
  double noise = 0.5;
  std::size_t sparsity = 4;
  FeatureLaw law = FeatureLaw::sphere;
  double signal_mass = 0.5;
};

/// l1/lq instance: k-sparse optimum with ||w*||_1 = B/2 on a random support,
/// features with ||x||_q = R, labels <w*, x> plus uniform noise (square and
/// absolute links) or logistic labels.
std::unique_ptr<ProblemInstance> gen_l1lq(const L1LqOptions& options, std::uint64_t seed);

struct SparseRegressionOptions {
  std::size_t dim = 4096;
  std::size_t sparsity = 4;
  double magnitude = 0.2;
  double q = 3.0;
  double noise = 0.2;
};

/// Square-loss regression with +-1 features (E[x x^T] = I) and a k-sparse
/// optimum of entries +-magnitude. The constraint radius equals ||w*||_1, and
/// restricted strong convexity holds with modulus 1 / (4k) in l1 geometry.
std::unique_ptr<ProblemInstance> gen_sparse_regression(const SparseRegressionOptions& options,
                                                       std::uint64_t seed);

struct HideAndSeekOptions {
  std::size_t dim = 32;
  double bias = 0.4;
  std::size_t hidden = 16;
  double q = 2.0;
  double radius = 1.0;
};

/// +-1 features whose coordinate `hidden` equals +1 with probability
/// 1/2 + bias; label y = 1 and linear link, so the risk is -2 bias w_hidden.
std::unique_ptr<ProblemInstance> gen_hide_and_seek(const HideAndSeekOptions& options);

struct L2L2Options {
  std::size_t dim = 1000;
  double radius = 1.0;
  double feature_norm = 1.0;
  double noise = 0.5;
  std::size_t sparsity = 4;
  FeatureLaw law = FeatureLaw::signal_block;
  double signal_mass = 0.5;
};

/// l2/l2 instance for the random-projection protocol: ||w*||_2 = B/2 on a
/// random support, square link.
std::unique_ptr<ProblemInstance> gen_l2l2(const L2L2Options& options, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Matrix instances

class MatrixSampler {
 public:
  virtual ~MatrixSampler() = default;
  virtual void next(MatrixExample& out) = 0;
};

class MatrixInstance {
 public:
  virtual ~MatrixInstance() = default;

  [[nodiscard]] const InstanceInfo& info() const noexcept { return info_; }
  [[nodiscard]] const LinkFunction& link() const noexcept { return link_; }
  [[nodiscard]] const DenseMatrix& optimum() const noexcept { return optimum_; }
  [[nodiscard]] std::size_t dim() const noexcept { return info_.dim; }

  [[nodiscard]] virtual std::unique_ptr<MatrixSampler> sampler(std::uint64_t seed) const = 0;
  [[nodiscard]] virtual double risk(const DenseMatrix& w) const = 0;
  [[nodiscard]] double excess_risk(const DenseMatrix& w) const {
    return risk(w) - info_.optimal_risk;
  }

 protected:
  MatrixInstance(InstanceInfo info, LinkFunction link, DenseMatrix optimum)
      : info_(std::move(info)), link_(link), optimum_(std::move(optimum)) {}

  InstanceInfo info_;
  LinkFunction link_;
  DenseMatrix optimum_;
};

struct MatrixOptions {
  std::size_t dim = 32;
  double q = 2.0;
  double radius = 1.0;
  double feature_norm = 1.0;
  std::size_t rank = 2;
  double noise = 0.5;
  double signal_mass = 0.5;
};

/// Nuclear-norm / Schatten-q instance: rank-r diagonal optimum with
/// ||W*||_{S_1} = B/2 and rank-one features X = R u v^T, with u and v drawn
/// from the l2 signal-block law aligned with the optimum's support.
std::unique_ptr<MatrixInstance> gen_matrix_s1sq(const MatrixOptions& options, std::uint64_t seed);

}  // namespace slcomm
