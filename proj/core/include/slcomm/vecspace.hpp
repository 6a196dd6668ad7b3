#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace slcomm {

/// Dense real vector of fixed, positive length.
///
/// A default-constructed vector is empty and only valid as a placeholder
/// (assignment target or moved-from state); every public operation that takes
/// vectors requires non-empty operands.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t dim, double fill = 0.0);
  DenseVector(std::initializer_list<double> values);
  explicit DenseVector(std::vector<double> values);

  static DenseVector unit(std::size_t dim, std::size_t index, double value = 1.0);

  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  [[nodiscard]] double* data() noexcept { return data_.data(); }
  [[nodiscard]] const double* data() const noexcept { return data_.data(); }
  [[nodiscard]] std::span<double> span() noexcept { return data_; }
  [[nodiscard]] std::span<const double> span() const noexcept { return data_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  [[nodiscard]] bool all_finite() const noexcept;
  void fill(double value) noexcept;

  DenseVector& operator+=(const DenseVector& other);
  DenseVector& operator-=(const DenseVector& other);
  DenseVector& operator*=(double factor) noexcept;

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> data_;
};

DenseVector operator+(DenseVector a, const DenseVector& b);
DenseVector operator-(DenseVector a, const DenseVector& b);
DenseVector operator*(double factor, DenseVector v);

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
std::size_t count_nonzero(std::span<const double> v) noexcept;

/// Order of an lp norm: a finite exponent p >= 1 or the infinity norm.
class LpOrder {
 public:
  /// Throws InvalidParameter when p < 1 or p is NaN. An infinite p selects
  /// the max-norm.
  static LpOrder finite(double p);
  static LpOrder infinity() noexcept { return LpOrder(0.0, true); }

  [[nodiscard]] bool is_infinity() const noexcept { return infinite_; }
  /// Exponent; only meaningful when !is_infinity().
  [[nodiscard]] double exponent() const noexcept { return p_; }

 private:
  LpOrder(double p, bool infinite) noexcept : p_(p), infinite_(infinite) {}
  double p_;
  bool infinite_;
};

/// lp norm computed with max-scaling, so it neither overflows nor loses the
/// small entries of badly scaled inputs.
double lp_norm(std::span<const double> v, LpOrder order);
double lp_norm(std::span<const double> v, double p);
inline double lp_norm(const DenseVector& v, double p) { return lp_norm(v.span(), p); }
inline double lp_norm(const DenseVector& v, LpOrder order) { return lp_norm(v.span(), order); }

/// Square real matrix, row-major.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t dim, double fill = 0.0);
  DenseMatrix(std::size_t dim, std::vector<double> row_major);

  static DenseMatrix identity(std::size_t dim);
  static DenseMatrix diagonal(std::span<const double> entries);
  /// a b^T
  static DenseMatrix outer(std::span<const double> a, std::span<const double> b);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * dim_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * dim_ + c]; }

  [[nodiscard]] std::span<double> row(std::size_t r) noexcept {
    return {data_.data() + r * dim_, dim_};
  }
  [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * dim_, dim_};
  }
  [[nodiscard]] std::span<double> flat() noexcept { return data_; }
  [[nodiscard]] std::span<const double> flat() const noexcept { return data_; }

  [[nodiscard]] DenseMatrix transposed() const;
  [[nodiscard]] double frobenius_norm() const;
  [[nodiscard]] bool all_finite() const noexcept;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double factor) noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double factor, DenseMatrix m);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
/// Frobenius inner product <A, B> = tr(A^T B).
double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b);

/// Thin SVD M = U diag(sigma) V^T of a square matrix.
///
/// sigma is sorted in descending order. U and V are orthogonal. Each column of
/// U has its first entry of magnitude above 1e-12 nonnegative; the matching
/// column of V carries the compensating sign.
struct SvdResult {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;

  /// U diag(values) V^T
  [[nodiscard]] DenseMatrix compose(std::span<const double> values) const;
  [[nodiscard]] DenseMatrix reconstruct() const { return compose(sigma); }
};

/// One-sided Jacobi SVD. Rotations stop once every column pair has relative
/// correlation below 1e-12; throws NumericalFailure if that is not reached
/// within the sweep cap.
SvdResult svd(const DenseMatrix& m);

double schatten_norm(const DenseMatrix& m, LpOrder order);
double schatten_norm(const DenseMatrix& m, double p);

}  // namespace slcomm
