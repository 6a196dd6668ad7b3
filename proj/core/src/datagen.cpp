#include "slcomm/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <boost/random/gamma_distribution.hpp>

#include "numeric.hpp"
#include "slcomm/errors.hpp"

namespace slcomm {

namespace {

constexpr std::size_t kHoldoutSamples = 1000000;
constexpr std::uint64_t kHoldoutSeed = 0x5eed0fa11ULL;

void check_q(double q) {
  if (!(q >= 2.0) || !std::isfinite(q)) throw InvalidParameter("feature exponent q must be >= 2");
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidParameter(std::string(what) + " must be positive and finite");
  }
}

std::vector<std::size_t> random_support(std::size_t dim, std::size_t k, CounterRng& rng) {
  // Partial Fisher-Yates.
  std::vector<std::size_t> idx(dim);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(dim - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Features drawn block-wise: each block gets an independent unit lq-sphere
/// draw scaled by its own factor. A single block covers the sphere law.
class BlockFeatureSampler {
 public:
  BlockFeatureSampler(std::size_t dim, double q, FeatureLaw law, double feature_norm,
                      double signal_mass, const std::vector<std::size_t>& support)
      : dim_(dim), q_(q), law_(law), norm_(feature_norm) {
    if (law == FeatureLaw::signal_block) {
      std::vector<bool> in(dim, false);
      for (std::size_t i : support) in[i] = true;
      for (std::size_t i = 0; i < dim; ++i) (in[i] ? signal_ : rest_).push_back(i);
      signal_scale_ = feature_norm * detail::fast_pow(signal_mass, 1.0 / q);
      rest_scale_ = feature_norm * detail::fast_pow(1.0 - signal_mass, 1.0 / q);
      buf_.resize(std::max(signal_.size(), rest_.size()));
    } else {
      buf_.resize(dim);
    }
  }

  void draw(std::span<double> x, CounterRng& rng) {
    switch (law_) {
      case FeatureLaw::sphere: {
        sample_lq_sphere(x, q_, rng);
        for (double& v : x) v *= norm_;
        break;
      }
      case FeatureLaw::rademacher: {
        const double unit = norm_ / detail::fast_pow(static_cast<double>(dim_), 1.0 / q_);
        for (double& v : x) v = rng.rademacher() * unit;
        break;
      }
      case FeatureLaw::signal_block: {
        fill_block(x, signal_, signal_scale_, rng);
        fill_block(x, rest_, rest_scale_, rng);
        break;
      }
    }
  }

  /// E[x_i^2] for every coordinate.
  [[nodiscard]] std::vector<double> second_moments() const {
    std::vector<double> m(dim_);
    switch (law_) {
      case FeatureLaw::sphere:
        std::fill(m.begin(), m.end(), norm_ * norm_ * lq_sphere_second_moment(dim_, q_));
        break;
      case FeatureLaw::rademacher: {
        const double unit = norm_ / detail::fast_pow(static_cast<double>(dim_), 1.0 / q_);
        std::fill(m.begin(), m.end(), unit * unit);
        break;
      }
      case FeatureLaw::signal_block: {
        auto put = [&](const std::vector<std::size_t>& block, double scale) {
          if (block.empty()) return;
          const double v = scale * scale * lq_sphere_second_moment(block.size(), q_);
          for (std::size_t i : block) m[i] = v;
        };
        put(signal_, signal_scale_);
        put(rest_, rest_scale_);
        break;
      }
    }
    return m;
  }

  /// max over all draws of ||x||_inf.
  [[nodiscard]] double sup_coordinate() const {
    switch (law_) {
      case FeatureLaw::rademacher:
        return norm_ / detail::fast_pow(static_cast<double>(dim_), 1.0 / q_);
      case FeatureLaw::signal_block: return std::max(signal_scale_, rest_scale_);
      case FeatureLaw::sphere: break;
    }
    return norm_;
  }

 private:
  void fill_block(std::span<double> x, const std::vector<std::size_t>& block, double scale,
                  CounterRng& rng) {
    if (block.empty()) return;
    std::span<double> tmp(buf_.data(), block.size());
    sample_lq_sphere(tmp, q_, rng);
    for (std::size_t j = 0; j < block.size(); ++j) x[block[j]] = scale * tmp[j];
  }

  std::size_t dim_;
  double q_;
  FeatureLaw law_;
  double norm_;
  std::vector<std::size_t> signal_;
  std::vector<std::size_t> rest_;
  double signal_scale_ = 0.0;
  double rest_scale_ = 0.0;
  std::vector<double> buf_;
};

/// Linear-model instance: labels from <w*, x> through the link's noise model.
class LinearInstance final : public ProblemInstance {
 public:
  LinearInstance(InstanceInfo info, LinkFunction link, DenseVector optimum,
                 BlockFeatureSampler features)
      : ProblemInstance(std::move(info), link, std::move(optimum)),
        features_(std::move(features)),
        moments_(features_.second_moments()) {}

  [[nodiscard]] std::unique_ptr<ExampleSampler> sampler(std::uint64_t seed) const override {
    return std::make_unique<Sampler>(*this, seed);
  }

  [[nodiscard]] std::optional<double> closed_form_risk(const DenseVector& w) const override {
    if (link_.kind() != LinkKind::square) return std::nullopt;
    if (w.size() != dim()) throw DimensionMismatch("risk: dimension mismatch");
    detail::CompensatedSum acc;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double diff = w[i] - optimum_[i];
      if (diff != 0.0) acc.add(moments_[i] * diff * diff);
    }
    return acc.value() + info_.optimal_risk;
  }

  [[nodiscard]] std::vector<double> second_moments() const override { return moments_; }

  void set_optimal_risk(double value) noexcept { info_.optimal_risk = value; }

 private:
  class Sampler final : public ExampleSampler {
   public:
    Sampler(const LinearInstance& owner, std::uint64_t seed)
        : owner_(owner), features_(owner.features_), rng_(seed, 0x1157) {}

    void next(Example& out) override {
      const std::size_t d = owner_.dim();
      if (out.x.size() != d) out.x = DenseVector(d);
      features_.draw(out.x.span(), rng_);
      const double a = dot(owner_.optimum_.span(), out.x.span());
      const double noise = owner_.info_.noise;
      if (owner_.link_.kind() == LinkKind::logistic) {
        const double p_pos = 1.0 / (1.0 + std::exp(-a));
        out.y = rng_.uniform01() < p_pos ? 1.0 : -1.0;
      } else {
        out.y = a + (noise > 0.0 ? noise * (2.0 * rng_.uniform01() - 1.0) : 0.0);
      }
    }

   private:
    const LinearInstance& owner_;
    BlockFeatureSampler features_;
    CounterRng rng_;
  };

  BlockFeatureSampler features_;
  std::vector<double> moments_;
};

class HideAndSeekInstance final : public ProblemInstance {
 public:
  HideAndSeekInstance(InstanceInfo info, DenseVector optimum, std::size_t hidden, double bias)
      : ProblemInstance(std::move(info), LinkFunction::linear(), std::move(optimum)),
        hidden_(hidden),
        bias_(bias),
        unit_(1.0) {}

  [[nodiscard]] std::unique_ptr<ExampleSampler> sampler(std::uint64_t seed) const override {
    return std::make_unique<Sampler>(*this, seed);
  }

  [[nodiscard]] std::optional<double> closed_form_risk(const DenseVector& w) const override {
    if (w.size() != dim()) throw DimensionMismatch("risk: dimension mismatch");
    return -2.0 * bias_ * unit_ * w[hidden_];
  }

  [[nodiscard]] std::vector<double> second_moments() const override {
    return std::vector<double>(dim(), unit_ * unit_);
  }

 private:
  class Sampler final : public ExampleSampler {
   public:
    Sampler(const HideAndSeekInstance& owner, std::uint64_t seed)
        : owner_(owner), rng_(seed, 0x41de) {}

    void next(Example& out) override {
      const std::size_t d = owner_.dim();
      if (out.x.size() != d) out.x = DenseVector(d);
      for (std::size_t i = 0; i < d; ++i) out.x[i] = rng_.rademacher();
      out.x[owner_.hidden_] = rng_.uniform01() < 0.5 + owner_.bias_ ? 1.0 : -1.0;
      out.y = 1.0;
    }

   private:
    const HideAndSeekInstance& owner_;
    CounterRng rng_;
  };

  std::size_t hidden_;
  double bias_;
  double unit_;
};

}  // namespace

FeatureLaw feature_law_from_name(const std::string& name) {
  if (name == "sphere") return FeatureLaw::sphere;
  if (name == "signal_block") return FeatureLaw::signal_block;
  if (name == "rademacher") return FeatureLaw::rademacher;
  throw InvalidParameter("unknown feature law '" + name + "'");
}

std::string feature_law_name(FeatureLaw law) {
  switch (law) {
    case FeatureLaw::sphere: return "sphere";
    case FeatureLaw::signal_block: return "signal_block";
    case FeatureLaw::rademacher: return "rademacher";
  }
  return "unknown";
}

std::optional<double> ProblemInstance::closed_form_risk(const DenseVector& /*w*/) const {
  return std::nullopt;
}

double ProblemInstance::risk(const DenseVector& w) const {
  if (auto exact = closed_form_risk(w)) return *exact;
  return holdout_risk(*this, w, kHoldoutSamples, kHoldoutSeed).mean;
}

double ProblemInstance::excess_risk(const DenseVector& w) const {
  return risk(w) - info_.optimal_risk;
}

HoldoutEstimate holdout_risk(const ProblemInstance& instance, const DenseVector& w,
                             std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw InvalidParameter("holdout_risk: need at least two samples");
  if (w.size() != instance.dim()) throw DimensionMismatch("holdout_risk: dimension mismatch");
  auto sampler = instance.sampler(seed);
  Example ex;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t n = 1; n <= samples; ++n) {
    sampler->next(ex);
    const double v = loss(instance.link(), w.span(), ex);
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples)), samples};
}

void sample_lq_sphere(std::span<double> out, double q, CounterRng& rng) {
  check_q(q);
  if (out.empty()) return;
  double norm = 0.0;
  do {
    if (q == 2.0) {
      for (double& v : out) v = rng.normal();
    } else {
      // |g|^q ~ Gamma(1/q, 1) gives density proportional to exp(-|g|^q).
      boost::random::gamma_distribution<double> gamma(1.0 / q, 1.0);
      const double inv_q = 1.0 / q;
      for (double& v : out) v = rng.rademacher() * std::pow(gamma(rng), inv_q);
    }
    norm = lp_norm(std::span<const double>(out.data(), out.size()), q);
  } while (norm == 0.0);
  const double inv = 1.0 / norm;
  for (double& v : out) v *= inv;
}

double lq_sphere_second_moment(std::size_t n, double q) {
  check_q(q);
  if (n == 0) throw InvalidParameter("lq_sphere_second_moment: n must be positive");
  if (q == 2.0) return 1.0 / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  const double log_m = std::lgamma(3.0 / q) - std::lgamma(1.0 / q) + std::lgamma(nn / q) -
                       std::lgamma((nn + 2.0) / q);
  return std::exp(log_m);
}

std::unique_ptr<ProblemInstance> gen_l1lq(const L1LqOptions& o, std::uint64_t seed) {
  check_q(o.q);
  check_positive(o.radius, "radius");
  check_positive(o.feature_norm, "feature_norm");
  if (o.dim == 0) throw InvalidParameter("gen_l1lq: dim must be positive");
  if (o.sparsity == 0 || o.sparsity > o.dim) {
    throw InvalidParameter("gen_l1lq: sparsity must lie in [1, dim]");
  }
  if (o.noise < 0.0) throw InvalidParameter("gen_l1lq: noise must be nonnegative");
  if (o.law == FeatureLaw::signal_block && !(o.signal_mass > 0.0 && o.signal_mass < 1.0)) {
    throw InvalidParameter("gen_l1lq: signal_mass must lie in (0, 1)");
  }
  const LinkKind kind = o.link.kind();
  if (kind != LinkKind::square && kind != LinkKind::absolute && kind != LinkKind::logistic) {
    throw InvalidParameter("gen_l1lq: link must be square, absolute or logistic");
  }

  CounterRng rng(seed, 0x11f0);
  const auto support = random_support(o.dim, o.sparsity, rng);
  DenseVector w_star(o.dim);
  const double mag = 0.5 * o.radius / static_cast<double>(o.sparsity);
  for (std::size_t i : support) w_star[i] = rng.rademacher() * mag;

  BlockFeatureSampler features(o.dim, o.q, o.law, o.feature_norm, o.signal_mass, support);
  const double x_inf = features.sup_coordinate();
  const double y_max = 0.5 * o.radius * x_inf + (kind == LinkKind::logistic ? 1.0 : o.noise);

  InstanceInfo info;
  info.name = "l1lq";
  info.dim = o.dim;
  info.q = o.q;
  info.radius = o.radius;
  info.feature_norm = o.feature_norm;
  info.noise = o.noise;
  info.sparsity = o.sparsity;
  info.gradient_bound = o.link.lipschitz(o.radius * x_inf, y_max) * o.feature_norm;
  if (kind == LinkKind::square) {
    info.optimal_risk = o.noise * o.noise / 3.0;
    info.smoothness = o.link.smoothness() * o.feature_norm * o.feature_norm;
  } else if (kind == LinkKind::absolute) {
    info.optimal_risk = o.noise / 2.0;
  } else {
    info.smoothness = o.link.smoothness() * o.feature_norm * o.feature_norm;
  }
  auto inst = std::make_unique<LinearInstance>(std::move(info), o.link, std::move(w_star),
                                               std::move(features));
  if (kind == LinkKind::logistic) {
    // No closed form: pin L* with a large holdout at the optimum.
    inst->set_optimal_risk(holdout_risk(*inst, inst->optimum(), 200000, kHoldoutSeed).mean);
  }
  return inst;
}

std::unique_ptr<ProblemInstance> gen_sparse_regression(const SparseRegressionOptions& o,
                                                       std::uint64_t seed) {
  check_q(o.q);
  check_positive(o.magnitude, "magnitude");
  if (o.dim == 0 || o.sparsity == 0 || o.sparsity > o.dim) {
    throw InvalidParameter("gen_sparse_regression: need 1 <= sparsity <= dim");
  }
  if (o.noise < 0.0) throw InvalidParameter("gen_sparse_regression: noise must be nonnegative");

  CounterRng rng(seed, 0x5a7e);
  const auto support = random_support(o.dim, o.sparsity, rng);
  DenseVector w_star(o.dim);
  for (std::size_t i : support) w_star[i] = rng.rademacher() * o.magnitude;

  const double radius = o.magnitude * static_cast<double>(o.sparsity);
  const double feature_norm = detail::fast_pow(static_cast<double>(o.dim), 1.0 / o.q);
  InstanceInfo info;
  info.name = "sparse_regression";
  info.dim = o.dim;
  info.q = o.q;
  info.radius = radius;
  info.feature_norm = feature_norm;
  info.noise = o.noise;
  info.sparsity = o.sparsity;
  info.optimal_risk = o.noise * o.noise / 3.0;
  info.smoothness = 2.0 * feature_norm * feature_norm;
  info.rsc = 1.0 / (4.0 * static_cast<double>(o.sparsity));
  info.gradient_bound = LinkFunction::square().lipschitz(radius, radius + o.noise) * feature_norm;

  BlockFeatureSampler features(o.dim, o.q, FeatureLaw::rademacher, feature_norm, 0.5, support);
  return std::make_unique<LinearInstance>(std::move(info), LinkFunction::square(),
                                          std::move(w_star), std::move(features));
}

std::unique_ptr<ProblemInstance> gen_hide_and_seek(const HideAndSeekOptions& o) {
  check_q(o.q);
  check_positive(o.radius, "radius");
  if (o.dim < 2) throw InvalidParameter("gen_hide_and_seek: dim must be at least 2");
  if (o.hidden >= o.dim) throw InvalidParameter("gen_hide_and_seek: hidden index out of range");
  if (!(o.bias >= 0.0 && o.bias <= 0.5)) {
    throw InvalidParameter("gen_hide_and_seek: bias must lie in [0, 1/2]");
  }
  const double feature_norm = detail::fast_pow(static_cast<double>(o.dim), 1.0 / o.q);
  InstanceInfo info;
  info.name = "hide_and_seek";
  info.dim = o.dim;
  info.q = o.q;
  info.radius = o.radius;
  info.feature_norm = feature_norm;
  info.gradient_bound = feature_norm;
  info.optimal_risk = -2.0 * o.bias * o.radius;
  info.sparsity = 1;
  DenseVector w_star = DenseVector::unit(o.dim, o.hidden, o.bias > 0.0 ? o.radius : 0.0);
  if (o.bias == 0.0) info.optimal_risk = 0.0;
  return std::make_unique<HideAndSeekInstance>(std::move(info), std::move(w_star), o.hidden,
                                               o.bias);
}

std::unique_ptr<ProblemInstance> gen_l2l2(const L2L2Options& o, std::uint64_t seed) {
  check_positive(o.radius, "radius");
  check_positive(o.feature_norm, "feature_norm");
  if (o.dim == 0 || o.sparsity == 0 || o.sparsity > o.dim) {
    throw InvalidParameter("gen_l2l2: need 1 <= sparsity <= dim");
  }
  if (o.noise < 0.0) throw InvalidParameter("gen_l2l2: noise must be nonnegative");

  CounterRng rng(seed, 0x1212);
  const auto support = random_support(o.dim, o.sparsity, rng);
  DenseVector w_star(o.dim);
  const double mag = 0.5 * o.radius / std::sqrt(static_cast<double>(o.sparsity));
  for (std::size_t i : support) w_star[i] = rng.rademacher() * mag;

  BlockFeatureSampler features(o.dim, 2.0, o.law, o.feature_norm, o.signal_mass, support);
  InstanceInfo info;
  info.name = "l2l2";
  info.dim = o.dim;
  info.q = 2.0;
  info.radius = o.radius;
  info.feature_norm = o.feature_norm;
  info.noise = o.noise;
  info.sparsity = o.sparsity;
  info.optimal_risk = o.noise * o.noise / 3.0;
  info.smoothness = 2.0 * o.feature_norm * o.feature_norm;
  info.gradient_bound =
      LinkFunction::square().lipschitz(o.radius * o.feature_norm,
                                       0.5 * o.radius * o.feature_norm + o.noise) *
      o.feature_norm;
  return std::make_unique<LinearInstance>(std::move(info), LinkFunction::square(),
                                          std::move(w_star), std::move(features));
}

// ---------------------------------------------------------------------------

namespace {

class RankOneInstance final : public MatrixInstance {
 public:
  RankOneInstance(InstanceInfo info, DenseMatrix optimum, double signal_mass, std::size_t rank)
      : MatrixInstance(std::move(info), LinkFunction::square(), std::move(optimum)),
        signal_mass_(signal_mass),
        rank_(rank) {
    const std::size_t d = info_.dim;
    std::vector<std::size_t> support(rank);
    std::iota(support.begin(), support.end(), std::size_t{0});
    support_ = support;
    moments_.assign(d, 0.0);
    const BlockFeatureSampler probe(d, 2.0, FeatureLaw::signal_block, 1.0, signal_mass, support_);
    moments_ = probe.second_moments();
  }

  [[nodiscard]] std::unique_ptr<MatrixSampler> sampler(std::uint64_t seed) const override {
    return std::make_unique<Sampler>(*this, seed);
  }

  [[nodiscard]] double risk(const DenseMatrix& w) const override {
    if (w.dim() != dim()) throw DimensionMismatch("matrix risk: dimension mismatch");
    const double r2 = info_.feature_norm * info_.feature_norm;
    detail::CompensatedSum acc;
    for (std::size_t i = 0; i < dim(); ++i) {
      for (std::size_t j = 0; j < dim(); ++j) {
        const double diff = w(i, j) - optimum_(i, j);
        if (diff != 0.0) acc.add(moments_[i] * moments_[j] * diff * diff);
      }
    }
    return r2 * acc.value() + info_.optimal_risk;
  }

 private:
  class Sampler final : public MatrixSampler {
   public:
    Sampler(const RankOneInstance& owner, std::uint64_t seed)
        : owner_(owner),
          features_(owner.dim(), 2.0, FeatureLaw::signal_block, 1.0, owner.signal_mass_,
                    owner.support_),
          u_(owner.dim()),
          v_(owner.dim()),
          rng_(seed, 0x3a7) {}

    void next(MatrixExample& out) override {
      const std::size_t d = owner_.dim();
      if (out.x.dim() != d) out.x = DenseMatrix(d);
      features_.draw(u_.span(), rng_);
      features_.draw(v_.span(), rng_);
      const double r = owner_.info_.feature_norm;
      double a = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        auto row = out.x.row(i);
        const double ui = r * u_[i];
        for (std::size_t j = 0; j < d; ++j) row[j] = ui * v_[j];
      }
      for (std::size_t i = 0; i < owner_.rank_; ++i) {
        for (std::size_t j = 0; j < owner_.rank_; ++j) a += owner_.optimum_(i, j) * out.x(i, j);
      }
      const double noise = owner_.info_.noise;
      out.y = a + (noise > 0.0 ? noise * (2.0 * rng_.uniform01() - 1.0) : 0.0);
    }

   private:
    const RankOneInstance& owner_;
    BlockFeatureSampler features_;
    DenseVector u_;
    DenseVector v_;
    CounterRng rng_;
  };

  double signal_mass_;
  std::size_t rank_;
  std::vector<std::size_t> support_;
  std::vector<double> moments_;
};

}  // namespace

std::unique_ptr<MatrixInstance> gen_matrix_s1sq(const MatrixOptions& o, std::uint64_t seed) {
  check_q(o.q);
  check_positive(o.radius, "radius");
  check_positive(o.feature_norm, "feature_norm");
  if (o.dim < 2 || o.rank == 0 || o.rank >= o.dim) {
    throw InvalidParameter("gen_matrix_s1sq: need dim >= 2 and 1 <= rank < dim");
  }
  if (!(o.signal_mass > 0.0 && o.signal_mass < 1.0)) {
    throw InvalidParameter("gen_matrix_s1sq: signal_mass must lie in (0, 1)");
  }
  if (o.noise < 0.0) throw InvalidParameter("gen_matrix_s1sq: noise must be nonnegative");

  CounterRng rng(seed, 0x3a70);
  DenseMatrix w_star(o.dim);
  const double mag = 0.5 * o.radius / static_cast<double>(o.rank);
  for (std::size_t i = 0; i < o.rank; ++i) w_star(i, i) = rng.rademacher() * mag;

  InstanceInfo info;
  info.name = "matrix_s1sq";
  info.dim = o.dim;
  info.q = o.q;
  info.radius = o.radius;
  info.feature_norm = o.feature_norm;
  info.noise = o.noise;
  info.sparsity = o.rank;
  info.optimal_risk = o.noise * o.noise / 3.0;
  info.smoothness = 2.0 * o.feature_norm * o.feature_norm;
  info.gradient_bound = LinkFunction::square().lipschitz(o.radius * o.feature_norm,
                                                         0.5 * o.radius * o.feature_norm + o.noise) *
                        o.feature_norm;
  return std::make_unique<RankOneInstance>(std::move(info), std::move(w_star), o.signal_mass,
                                           o.rank);
}

}  // namespace slcomm
