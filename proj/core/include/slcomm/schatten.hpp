#pragma once

#include <vector>

#include "slcomm/mirror.hpp"
#include "slcomm/vecspace.hpp"

namespace slcomm {

/// Spectral regularizer R(W) = 1/2 ||W||_{S_p}^2 with p in (1, 2].
///
/// All maps act on singular values: grad R(W) = U diag(g(sigma)) V^T with g the
/// lp duality map, and likewise for the conjugate with exponent q.
class SchattenMirrorMap {
 public:
  explicit SchattenMirrorMap(double p);
  static SchattenMirrorMap from_dual_exponent(double q);

  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] double q() const noexcept { return q_; }
  [[nodiscard]] double value(const DenseMatrix& w) const;

 private:
  double p_;
  double q_;
};

DenseMatrix grad_reg(const SchattenMirrorMap& map, const DenseMatrix& w);
DenseMatrix inv_grad_reg(const SchattenMirrorMap& map, const DenseMatrix& theta);
double bregman(const SchattenMirrorMap& map, const DenseMatrix& w, const DenseMatrix& w_prime);

/// Point in spectral form: primal = U diag(primal_sigma) V^T and
/// dual = U diag(dual_sigma) V^T share one singular basis.
struct SpectralPoint {
  SvdResult basis;
  std::vector<double> primal_sigma;
  std::vector<double> dual_sigma;

  [[nodiscard]] DenseMatrix primal() const { return basis.compose(primal_sigma); }
  [[nodiscard]] DenseMatrix dual() const { return basis.compose(dual_sigma); }
};

/// Bregman projection of a dual matrix onto the nuclear-norm ball
/// {||W||_{S_1} <= B}: the vector projection applied to the singular values.
SpectralPoint bregman_project(const SchattenMirrorMap& map, const L1Ball& ball,
                              const DenseMatrix& theta);

}  // namespace slcomm
