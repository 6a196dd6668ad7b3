#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slcomm/protocols.hpp"

namespace slcomm {

/// Sparse sign random projection A in R^{k x d}: every column holds
/// `column_sparsity` entries +-1/sqrt(column_sparsity) at distinct rows, so
/// E ||A x||_2^2 = ||x||_2^2. The matrix is a pure function of its seed.
class SparseJlMatrix {
 public:
  SparseJlMatrix(std::size_t rows, std::size_t cols, std::size_t column_sparsity,
                 std::uint64_t seed);
  /// k = d with A = I.
  static SparseJlMatrix identity(std::size_t dim);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t column_sparsity() const noexcept { return per_col_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  /// out = A x (out has `rows` entries).
  void apply(std::span<const double> x, std::span<double> out) const;
  /// out = A^T u (out has `cols` entries).
  void apply_transpose(std::span<const double> u, std::span<double> out) const;

 private:
  SparseJlMatrix() = default;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t per_col_ = 0;
  std::uint64_t seed_ = 0;
  double value_ = 1.0;
  std::vector<std::uint32_t> row_index_;  ///< per_col_ rows per column
  std::vector<double> sign_;
};

struct JlConfig {
  std::size_t dim = 0;
  std::size_t examples = 0;
  std::size_t machines = 1;
  std::size_t sketch_dim = 0;
  std::size_t column_sparsity = 1;
  double step = 0.0;
  /// Debug mode: A = I, so the protocol is plain online gradient descent.
  bool identity_sketch = false;

  void validate() const;
};

/// k = min(ceil(N ln(d N)), d), column sparsity ceil(ln N), eta = B / (R sqrt N).
JlConfig default_jl_config(std::size_t dim, std::size_t examples, std::size_t machines,
                           double radius, double gradient_bound);

/// Online gradient descent in the sketched space u in R^k on features A x.
/// Machine 1 broadcasts the projection seed (64 bits plus two 32-bit shape
/// fields); each hand-off ships the sketched iterate and the running sum at
/// 64 bits per entry. Returns A^T of the averaged sketched iterate.
RunResult run_jl_ogd(ExampleSampler& data, const LinkFunction& link, const JlConfig& cfg,
                     const CounterRng& rng);

/// Unconstrained online gradient descent in R^d returning the average iterate.
RunResult run_centralized_ogd(ExampleSampler& data, const LinkFunction& link, std::size_t dim,
                              std::size_t examples, double step);

}  // namespace slcomm
