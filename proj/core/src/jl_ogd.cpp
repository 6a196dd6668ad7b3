#include "slcomm/jl_ogd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slcomm/errors.hpp"

namespace slcomm {

SparseJlMatrix::SparseJlMatrix(std::size_t rows, std::size_t cols, std::size_t column_sparsity,
                               std::uint64_t seed)
    : rows_(rows), cols_(cols), per_col_(column_sparsity), seed_(seed) {
  if (rows == 0 || cols == 0) throw InvalidParameter("SparseJlMatrix: shape must be positive");
  if (column_sparsity == 0 || column_sparsity > rows) {
    throw InvalidParameter("SparseJlMatrix: column sparsity must lie in [1, rows]");
  }
  if (rows > 0xFFFFFFFFULL) throw Unsupported("SparseJlMatrix: too many rows");
  value_ = 1.0 / std::sqrt(static_cast<double>(column_sparsity));
  row_index_.resize(cols * per_col_);
  sign_.resize(cols * per_col_);
  const CounterRng base(seed, 0x71);
  std::vector<std::uint32_t> chosen;
  for (std::size_t j = 0; j < cols; ++j) {
    CounterRng col_rng = base.split(j);
    // Floyd's algorithm for a uniform subset of size per_col_.
    chosen.clear();
    for (std::size_t t = rows - per_col_; t < rows; ++t) {
      const auto r = static_cast<std::uint32_t>(col_rng.uniform_index(t + 1));
      if (std::find(chosen.begin(), chosen.end(), r) == chosen.end()) {
        chosen.push_back(r);
      } else {
        chosen.push_back(static_cast<std::uint32_t>(t));
      }
    }
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t e = 0; e < per_col_; ++e) {
      row_index_[j * per_col_ + e] = chosen[e];
      sign_[j * per_col_ + e] = col_rng.rademacher() * value_;
    }
  }
}

SparseJlMatrix SparseJlMatrix::identity(std::size_t dim) {
  if (dim == 0) throw InvalidParameter("SparseJlMatrix: dimension must be positive");
  SparseJlMatrix a;
  a.rows_ = dim;
  a.cols_ = dim;
  a.per_col_ = 1;
  a.row_index_.resize(dim);
  a.sign_.assign(dim, 1.0);
  for (std::size_t j = 0; j < dim; ++j) a.row_index_[j] = static_cast<std::uint32_t>(j);
  return a;
}

void SparseJlMatrix::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != cols_ || out.size() != rows_) throw DimensionMismatch("SparseJlMatrix::apply");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const std::size_t base = j * per_col_;
    for (std::size_t e = 0; e < per_col_; ++e) out[row_index_[base + e]] += sign_[base + e] * xj;
  }
}

void SparseJlMatrix::apply_transpose(std::span<const double> u, std::span<double> out) const {
  if (u.size() != rows_ || out.size() != cols_) {
    throw DimensionMismatch("SparseJlMatrix::apply_transpose");
  }
  for (std::size_t j = 0; j < cols_; ++j) {
    const std::size_t base = j * per_col_;
    double acc = 0.0;
    for (std::size_t e = 0; e < per_col_; ++e) acc += sign_[base + e] * u[row_index_[base + e]];
    out[j] = acc;
  }
}

void JlConfig::validate() const {
  if (dim == 0 || examples == 0 || machines == 0) {
    throw InvalidConfig("d, N and m must be positive");
  }
  if (examples % machines != 0) throw InvalidConfig("N is not divisible by m");
  if (!identity_sketch && (sketch_dim == 0 || column_sparsity == 0 || column_sparsity > sketch_dim)) {
    throw InvalidConfig("sketch dimension and column sparsity are inconsistent");
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidParameter("eta must be positive");
}

JlConfig default_jl_config(std::size_t dim, std::size_t examples, std::size_t machines,
                           double radius, double gradient_bound) {
  if (!(radius > 0.0) || !(gradient_bound > 0.0)) {
    throw InvalidParameter("B and R must be positive");
  }
  JlConfig cfg;
  cfg.dim = dim;
  cfg.examples = examples;
  cfg.machines = machines;
  const double n = static_cast<double>(examples);
  const double k = std::ceil(n * std::log(static_cast<double>(dim) * n));
  cfg.sketch_dim = static_cast<std::size_t>(std::min(k, static_cast<double>(dim)));
  cfg.column_sparsity =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(std::log(n))), 1, cfg.sketch_dim);
  cfg.step = radius / (gradient_bound * std::sqrt(n));
  cfg.validate();
  return cfg;
}

RunResult run_jl_ogd(ExampleSampler& data, const LinkFunction& link, const JlConfig& cfg,
                     const CounterRng& rng) {
  cfg.validate();
  const std::uint64_t seed = rng.split(0x5eed)();
  const SparseJlMatrix a = cfg.identity_sketch
                               ? SparseJlMatrix::identity(cfg.dim)
                               : SparseJlMatrix(cfg.sketch_dim, cfg.dim, cfg.column_sparsity, seed);
  const std::size_t k = a.rows();
  const std::size_t n = cfg.examples / cfg.machines;

  RunResult result;
  result.ledger = CommLedger(cfg.machines);
  if (!cfg.identity_sketch) result.ledger.record(1, MessageKind::sketch_seed, {0, 64 + 32 + 32});

  std::vector<double> u(k, 0.0);
  std::vector<double> sum(k, 0.0);
  std::vector<double> xs(k);
  Example ex;
  for (std::size_t i = 1; i <= cfg.machines; ++i) {
    if (i > 1) {
      result.ledger.record(i - 1, MessageKind::sketch_state,
                           {0, 2 * 64 * static_cast<std::uint64_t>(k)});
    }
    for (std::size_t t = 0; t < n; ++t) {
      data.next(ex);
      a.apply(ex.x.span(), xs);
      for (std::size_t r = 0; r < k; ++r) sum[r] += u[r];
      double dotp = 0.0;
      for (std::size_t r = 0; r < k; ++r) dotp += u[r] * xs[r];
      const double g = link.derivative(dotp, ex.y);
      if (g != 0.0) {
        const double f = -cfg.step * g;
        for (std::size_t r = 0; r < k; ++r) u[r] += f * xs[r];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(cfg.examples);
  for (double& v : sum) v *= inv;
  result.estimate = DenseVector(cfg.dim);
  a.apply_transpose(sum, result.estimate.span());
  return result;
}

RunResult run_centralized_ogd(ExampleSampler& data, const LinkFunction& link, std::size_t dim,
                              std::size_t examples, double step) {
  if (dim == 0 || examples == 0) throw InvalidConfig("d and N must be positive");
  if (!(step > 0.0)) throw InvalidParameter("eta must be positive");
  RunResult result;
  result.ledger = CommLedger(1);
  DenseVector w(dim);
  DenseVector sum(dim);
  Example ex;
  for (std::size_t t = 0; t < examples; ++t) {
    data.next(ex);
    sum += w;
    const double g = link.derivative(dot(w.span(), ex.x.span()), ex.y);
    if (g != 0.0) axpy(-step * g, ex.x.span(), w.span());
  }
  sum *= 1.0 / static_cast<double>(examples);
  result.estimate = std::move(sum);
  return result;
}

}  // namespace slcomm
