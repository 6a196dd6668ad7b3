#include "slcomm/vecspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "numeric.hpp"
#include "slcomm/errors.hpp"

namespace slcomm {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": sizes " + std::to_string(a) + " and " +
                            std::to_string(b) + " differ");
  }
}

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw InvalidParameter(std::string(what) + ": dimension must be positive");
}

}  // namespace

DenseVector::DenseVector(std::size_t dim, double fill) : data_(dim, fill) {
  require_nonempty(dim, "DenseVector");
}

DenseVector::DenseVector(std::initializer_list<double> values) : data_(values) {
  require_nonempty(data_.size(), "DenseVector");
}

DenseVector::DenseVector(std::vector<double> values) : data_(std::move(values)) {
  require_nonempty(data_.size(), "DenseVector");
}

DenseVector DenseVector::unit(std::size_t dim, std::size_t index, double value) {
  if (index >= dim) throw InvalidParameter("DenseVector::unit: index out of range");
  DenseVector v(dim);
  v[index] = value;
  return v;
}

bool DenseVector::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

void DenseVector::fill(double value) noexcept { std::fill(data_.begin(), data_.end(), value); }

DenseVector& DenseVector::operator+=(const DenseVector& other) {
  require_same_size(size(), other.size(), "DenseVector::operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseVector& DenseVector::operator-=(const DenseVector& other) {
  require_same_size(size(), other.size(), "DenseVector::operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseVector& DenseVector::operator*=(double factor) noexcept {
  for (double& x : data_) x *= factor;
  return *this;
}

DenseVector operator+(DenseVector a, const DenseVector& b) { return a += b; }
DenseVector operator-(DenseVector a, const DenseVector& b) { return a -= b; }
DenseVector operator*(double factor, DenseVector v) { return v *= factor; }

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double s0 = 0.0;
  double s1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < a.size(); i += 2) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
  }
  if (i < a.size()) s0 += a[i] * b[i];
  return s0 + s1;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

std::size_t count_nonzero(std::span<const double> v) noexcept {
  return static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }));
}

LpOrder LpOrder::finite(double p) {
  if (std::isnan(p) || p < 1.0) {
    throw InvalidParameter("lp norm order must satisfy p >= 1, got " + std::to_string(p));
  }
  if (std::isinf(p)) return infinity();
  return {p, false};
}

double lp_norm(std::span<const double> v, LpOrder order) {
  require_nonempty(v.size(), "lp_norm");
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::fabs(x));
  if (order.is_infinity() || peak == 0.0 || !std::isfinite(peak)) return peak;

  const double p = order.exponent();
  detail::CompensatedSum acc;
  if (p == 1.0) {
    for (double x : v) acc.add(std::fabs(x));
    return acc.value();
  }
  const double inv_peak = 1.0 / peak;
  if (p == 2.0) {
    for (double x : v) {
      const double t = x * inv_peak;
      acc.add(t * t);
    }
    return peak * std::sqrt(acc.value());
  }
  for (double x : v) {
    if (x != 0.0) acc.add(detail::fast_pow(std::fabs(x) * inv_peak, p));
  }
  return peak * detail::fast_pow(acc.value(), 1.0 / p);
}

double lp_norm(std::span<const double> v, double p) { return lp_norm(v, LpOrder::finite(p)); }

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(std::size_t dim, double fill) : dim_(dim), data_(dim * dim, fill) {
  require_nonempty(dim, "DenseMatrix");
}

DenseMatrix::DenseMatrix(std::size_t dim, std::vector<double> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  require_nonempty(dim, "DenseMatrix");
  require_same_size(data_.size(), dim * dim, "DenseMatrix");
}

DenseMatrix DenseMatrix::identity(std::size_t dim) {
  DenseMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> entries) {
  DenseMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

DenseMatrix DenseMatrix::outer(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "DenseMatrix::outer");
  DenseMatrix m(a.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    for (std::size_t c = 0; c < b.size(); ++c) m(r, c) = a[r] * b[c];
  }
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

double DenseMatrix::frobenius_norm() const { return lp_norm(flat(), 2.0); }

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require_same_size(dim_, other.dim_, "DenseMatrix::operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  require_same_size(dim_, other.dim_, "DenseMatrix::operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double factor) noexcept {
  for (double& x : data_) x *= factor;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double factor, DenseMatrix m) { return m *= factor; }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_size(a.dim(), b.dim(), "DenseMatrix::operator*");
  const std::size_t d = a.dim();
  DenseMatrix out(d);
  for (std::size_t r = 0; r < d; ++r) {
    auto out_row = out.row(r);
    for (std::size_t k = 0; k < d; ++k) {
      const double f = a(r, k);
      if (f == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t c = 0; c < d; ++c) out_row[c] += f * b_row[c];
    }
  }
  return out;
}

double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_size(a.dim(), b.dim(), "frobenius_dot");
  return dot(a.flat(), b.flat());
}

// ---------------------------------------------------------------------------
// SVD

DenseMatrix SvdResult::compose(std::span<const double> values) const {
  const std::size_t d = u.dim();
  require_same_size(values.size(), d, "SvdResult::compose");
  DenseMatrix out(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double s = values[k];
    if (s == 0.0) continue;
    for (std::size_t r = 0; r < d; ++r) {
      const double f = s * u(r, k);
      if (f == 0.0) continue;
      auto out_row = out.row(r);
      for (std::size_t c = 0; c < d; ++c) out_row[c] += f * v(c, k);
    }
  }
  return out;
}

namespace {

constexpr double kJacobiTolerance = 1e-12;
constexpr int kMaxSweeps = 80;
constexpr double kSignThreshold = 1e-12;

// Column-major scratch: column j occupies [j*d, (j+1)*d).
void rotate_columns(std::vector<double>& cols, std::size_t d, std::size_t i, std::size_t j,
                    double c, double s) {
  double* a = cols.data() + i * d;
  double* b = cols.data() + j * d;
  for (std::size_t k = 0; k < d; ++k) {
    const double x = a[k];
    const double y = b[k];
    a[k] = c * x - s * y;
    b[k] = s * x + c * y;
  }
}

// Gram-Schmidt completion of the columns flagged in `missing` against the
// already orthonormal ones, using standard basis vectors as candidates.
void complete_basis(std::vector<double>& cols, std::size_t d, const std::vector<bool>& missing) {
  std::size_t next_candidate = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (!missing[j]) continue;
    double* target = cols.data() + j * d;
    bool done = false;
    while (!done && next_candidate < d) {
      std::fill(target, target + d, 0.0);
      target[next_candidate++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < d; ++k) {
          if (k == j || (missing[k] && k > j)) continue;
          const double* other = cols.data() + k * d;
          double proj = 0.0;
          for (std::size_t r = 0; r < d; ++r) proj += other[r] * target[r];
          for (std::size_t r = 0; r < d; ++r) target[r] -= proj * other[r];
        }
      }
      double norm = 0.0;
      for (std::size_t r = 0; r < d; ++r) norm += target[r] * target[r];
      norm = std::sqrt(norm);
      if (norm > 1e-6) {
        for (std::size_t r = 0; r < d; ++r) target[r] /= norm;
        done = true;
      }
    }
    if (!done) throw NumericalFailure("svd: could not complete orthonormal basis");
  }
}

}  // namespace

SvdResult svd(const DenseMatrix& m) {
  const std::size_t d = m.dim();
  require_nonempty(d, "svd");
  if (!m.all_finite()) throw InvalidParameter("svd: matrix has non-finite entries");

  std::vector<double> a(d * d);
  std::vector<double> v(d * d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) a[c * d + r] = m(r, c);
  }
  for (std::size_t k = 0; k < d; ++k) v[k * d + k] = 1.0;

  // Columns at rounding level carry no direction and are never rotated;
  // relative orthogonality among them cannot improve.
  double fro_sq = 0.0;
  for (double x : a) fro_sq += x * x;
  const double null_norm = 1e-12 * std::sqrt(fro_sq);
  const double floor_sq = null_norm * null_norm;

  bool converged = d == 1;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        const double* ai = a.data() + i * d;
        const double* aj = a.data() + j * d;
        double alpha = 0.0;
        double beta = 0.0;
        double gamma = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          alpha += ai[k] * ai[k];
          beta += aj[k] * aj[k];
          gamma += ai[k] * aj[k];
        }
        if (gamma == 0.0 || alpha <= floor_sq || beta <= floor_sq) continue;
        if (std::fabs(gamma) <= kJacobiTolerance * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = detail::sign_of(zeta == 0.0 ? 1.0 : zeta) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate_columns(a, d, i, j, c, s);
        rotate_columns(v, d, i, j, c, s);
      }
    }
    converged = !rotated;
  }
  if (!converged) throw NumericalFailure("svd: Jacobi sweeps did not converge");

  std::vector<double> sigma(d);
  double sigma_max = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double* col = a.data() + j * d;
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) sq += col[k] * col[k];
    sigma[j] = std::sqrt(sq);
    sigma_max = std::max(sigma_max, sigma[j]);
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double negligible = std::max(null_norm, static_cast<double>(d) * 1e-15 * sigma_max);
  std::vector<double> ucols(d * d, 0.0);
  std::vector<double> vcols(d * d, 0.0);
  std::vector<double> sorted_sigma(d);
  std::vector<bool> missing(d, false);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t src = order[j];
    sorted_sigma[j] = sigma[src];
    std::copy_n(v.data() + src * d, d, vcols.data() + j * d);
    if (sigma[src] > negligible && sigma[src] > 0.0) {
      const double inv = 1.0 / sigma[src];
      for (std::size_t k = 0; k < d; ++k) ucols[j * d + k] = a[src * d + k] * inv;
    } else {
      missing[j] = true;
    }
  }
  if (std::find(missing.begin(), missing.end(), true) != missing.end()) {
    complete_basis(ucols, d, missing);
  }

  SvdResult out{DenseMatrix(d), std::move(sorted_sigma), DenseMatrix(d)};
  for (std::size_t j = 0; j < d; ++j) {
    double* ucol = ucols.data() + j * d;
    double* vcol = vcols.data() + j * d;
    double flip = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      if (std::fabs(ucol[k]) > kSignThreshold) {
        flip = ucol[k] < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t k = 0; k < d; ++k) {
      out.u(k, j) = flip * ucol[k];
      out.v(k, j) = flip * vcol[k];
    }
  }
  return out;
}

double schatten_norm(const DenseMatrix& m, LpOrder order) {
  const SvdResult res = svd(m);
  return lp_norm(std::span<const double>(res.sigma), order);
}

double schatten_norm(const DenseMatrix& m, double p) {
  return schatten_norm(m, LpOrder::finite(p));
}

}  // namespace slcomm
