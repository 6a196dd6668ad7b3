#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "slcomm/rng.hpp"
#include "slcomm/vecspace.hpp"

namespace slcomm {

/// Labeled example for linear models.
struct Example {
  DenseVector x;
  double y = 0.0;
};

/// Labeled example for matrix linear models, y ~ <W, X>_F.
struct MatrixExample {
  DenseMatrix x;
  double y = 0.0;
};

enum class LinkKind { linear, square, absolute, hinge, logistic };

/// Scalar link phi(a, y) of a linear model l(w, (x, y)) = phi(<w, x>, y).
class LinkFunction {
 public:
  static LinkFunction linear() noexcept { return LinkFunction(LinkKind::linear); }
  static LinkFunction square() noexcept { return LinkFunction(LinkKind::square); }
  static LinkFunction absolute() noexcept { return LinkFunction(LinkKind::absolute); }
  static LinkFunction hinge() noexcept { return LinkFunction(LinkKind::hinge); }
  static LinkFunction logistic() noexcept { return LinkFunction(LinkKind::logistic); }
  /// Parses "linear", "square", "absolute", "hinge" or "logistic".
  static LinkFunction from_name(std::string_view name);

  [[nodiscard]] LinkKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::string name() const;

  [[nodiscard]] double value(double a, double y) const noexcept;
  /// A subgradient in a; sgn(0) = 0 at kinks.
  [[nodiscard]] double derivative(double a, double y) const noexcept;

  [[nodiscard]] bool smooth() const noexcept {
    return kind_ == LinkKind::square || kind_ == LinkKind::logistic || kind_ == LinkKind::linear;
  }
  /// Second-derivative bound in a for |y| <= 1 (0 for the linear link).
  /// Throws InvalidParameter for non-smooth links.
  [[nodiscard]] double smoothness() const;
  /// Bound on |phi'(a, y)| over |a| <= a_max, |y| <= y_max.
  [[nodiscard]] double lipschitz(double a_max, double y_max) const noexcept;

  friend bool operator==(const LinkFunction&, const LinkFunction&) = default;

 private:
  explicit LinkFunction(LinkKind kind) noexcept : kind_(kind) {}
  LinkKind kind_;
};

double loss(const LinkFunction& link, std::span<const double> w, const Example& ex);
/// Writes phi'(<w, x>, y) x into out and returns phi'(<w, x>, y).
double subgradient(const LinkFunction& link, std::span<const double> w, const Example& ex,
                   std::span<double> out);

double loss(const LinkFunction& link, const DenseMatrix& w, const MatrixExample& ex);
double subgradient(const LinkFunction& link, const DenseMatrix& w, const MatrixExample& ex,
                   DenseMatrix& out);

struct SelfBoundReport {
  std::size_t cases = 0;
  /// max over sampled (a, y) of |phi'|^2 / (4 beta phi); below 1 when the
  /// self-bounding inequality holds.
  double worst_ratio = 0.0;
  bool passed = false;
};

/// Checks |phi'(a, y)|^2 <= 4 beta phi(a, y) at random points with |y| <= 1.
SelfBoundReport smoothness_selfbound_check(const LinkFunction& link, CounterRng& rng,
                                           std::size_t trials = 10000);

}  // namespace slcomm
