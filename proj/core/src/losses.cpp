#include "slcomm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numeric.hpp"
#include "slcomm/errors.hpp"

namespace slcomm {

LinkFunction LinkFunction::from_name(std::string_view name) {
  if (name == "linear") return linear();
  if (name == "square") return square();
  if (name == "absolute") return absolute();
  if (name == "hinge") return hinge();
  if (name == "logistic") return logistic();
  throw InvalidParameter("unknown link function '" + std::string(name) + "'");
}

std::string LinkFunction::name() const {
  switch (kind_) {
    case LinkKind::linear: return "linear";
    case LinkKind::square: return "square";
    case LinkKind::absolute: return "absolute";
    case LinkKind::hinge: return "hinge";
    case LinkKind::logistic: return "logistic";
  }
  return "unknown";
}

double LinkFunction::value(double a, double y) const noexcept {
  switch (kind_) {
    case LinkKind::linear: return -a * y;
    case LinkKind::square: return (a - y) * (a - y);
    case LinkKind::absolute: return std::fabs(a - y);
    case LinkKind::hinge: return std::max(0.0, 1.0 - y * a);
    case LinkKind::logistic: {
      const double z = -y * a;
      // log(1 + e^z) without overflow
      return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
  }
  return 0.0;
}

double LinkFunction::derivative(double a, double y) const noexcept {
  switch (kind_) {
    case LinkKind::linear: return -y;
    case LinkKind::square: return 2.0 * (a - y);
    case LinkKind::absolute: return detail::sign_of(a - y);
    case LinkKind::hinge: return y * a < 1.0 ? -y : 0.0;
    case LinkKind::logistic: {
      const double z = y * a;
      // -y * sigmoid(-z)
      const double s = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
      return -y * s;
    }
  }
  return 0.0;
}

double LinkFunction::smoothness() const {
  switch (kind_) {
    case LinkKind::linear: return 0.0;
    case LinkKind::square: return 2.0;
    case LinkKind::logistic: return 0.25;
    default: throw InvalidParameter("link '" + name() + "' is not smooth");
  }
}

double LinkFunction::lipschitz(double a_max, double y_max) const noexcept {
  switch (kind_) {
    case LinkKind::linear: return y_max;
    case LinkKind::square: return 2.0 * (a_max + y_max);
    case LinkKind::absolute: return 1.0;
    case LinkKind::hinge: return y_max;
    case LinkKind::logistic: return y_max;
  }
  return 0.0;
}

double loss(const LinkFunction& link, std::span<const double> w, const Example& ex) {
  return link.value(dot(w, ex.x.span()), ex.y);
}

double subgradient(const LinkFunction& link, std::span<const double> w, const Example& ex,
                   std::span<double> out) {
  if (out.size() != ex.x.size()) throw DimensionMismatch("subgradient: output size mismatch");
  const double g = link.derivative(dot(w, ex.x.span()), ex.y);
  const auto x = ex.x.span();
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = g * x[i];
  return g;
}

double loss(const LinkFunction& link, const DenseMatrix& w, const MatrixExample& ex) {
  return link.value(frobenius_dot(w, ex.x), ex.y);
}

double subgradient(const LinkFunction& link, const DenseMatrix& w, const MatrixExample& ex,
                   DenseMatrix& out) {
  const double g = link.derivative(frobenius_dot(w, ex.x), ex.y);
  out = g * ex.x;
  return g;
}

SelfBoundReport smoothness_selfbound_check(const LinkFunction& link, CounterRng& rng,
                                           std::size_t trials) {
  const double beta = link.smoothness();
  SelfBoundReport report;
  report.passed = true;
  for (std::size_t t = 0; t < trials; ++t) {
    const double a = 20.0 * (rng.uniform01() - 0.5);
    double y = 2.0 * rng.uniform01() - 1.0;
    if (link.kind() == LinkKind::logistic) y = y >= 0.0 ? 1.0 : -1.0;
    const double g = link.derivative(a, y);
    const double v = link.value(a, y);
    ++report.cases;
    if (g == 0.0) continue;
    const double ratio = v > 0.0 && beta > 0.0 ? (g * g) / (4.0 * beta * v)
                                               : std::numeric_limits<double>::infinity();
    report.worst_ratio = std::max(report.worst_ratio, ratio);
    if (!(ratio <= 1.0)) report.passed = false;
  }
  return report;
}

}  // namespace slcomm
