#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slcomm/vecspace.hpp"

namespace slcomm {

/// Regularizer R(w) = 1/2 ||w - center||_p^2 with p in (1, 2].
///
/// R is (p - 1)-strongly convex with respect to ||.||_p. Its gradient and the
/// gradient of its conjugate are the duality maps between lp and lq, q = p/(p-1).
class MirrorMap {
 public:
  MirrorMap(double p, DenseVector center);
  static MirrorMap at_origin(double p, std::size_t dim);
  /// Builds the map from the dual exponent q >= 2.
  static MirrorMap from_dual_exponent(double q, DenseVector center);

  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] double q() const noexcept { return q_; }
  /// Strong convexity modulus p - 1; its inverse is the constant C_q = q - 1.
  [[nodiscard]] double strong_convexity() const noexcept { return p_ - 1.0; }
  [[nodiscard]] std::size_t dim() const noexcept { return center_.size(); }
  [[nodiscard]] const DenseVector& center() const noexcept { return center_; }
  [[nodiscard]] bool centered_at_origin() const noexcept { return origin_; }

  [[nodiscard]] double value(const DenseVector& w) const;

 private:
  double p_;
  double q_;
  DenseVector center_;
  bool origin_;
};

/// Feasible set {w : ||w||_1 <= radius}.
class L1Ball {
 public:
  explicit L1Ball(double radius);
  [[nodiscard]] double radius() const noexcept { return radius_; }
  [[nodiscard]] bool contains(const DenseVector& w, double rel_tol = 1e-9) const;

 private:
  double radius_;
};

/// Gradient of the centered lp half-square: y_i = ||t||_p^{2-p} |t_i|^{p-1} sgn(t_i).
/// Output may alias nothing; sizes must agree.
void lp_duality_map(std::span<const double> t, double p, std::span<double> out);

DenseVector grad_reg(const MirrorMap& map, const DenseVector& w);
DenseVector inv_grad_reg(const MirrorMap& map, const DenseVector& theta);
/// Bregman divergence D_R(w || w_prime), clamped at zero to absorb rounding.
double bregman(const MirrorMap& map, const DenseVector& w, const DenseVector& w_prime);

/// Bregman projection of the dual point theta onto the l1 ball:
/// argmin_{||w||_1 <= B} R(w) - <theta, w>.
///
/// When the unconstrained point inv_grad(theta) is feasible it is returned
/// unchanged. Otherwise the multiplier of the l1 constraint is located by a
/// safeguarded bracketing search until ||w||_1 lies in [B(1 - 1e-9), B].
class BregmanProjector {
 public:
  BregmanProjector(MirrorMap map, L1Ball ball);

  struct Stats {
    double multiplier = 0.0;
    int iterations = 0;
    bool active = false;
  };

  /// Writes the projected point and grad R at it. Throws NumericalFailure when
  /// the search does not converge within 200 steps.
  Stats project(std::span<const double> theta, std::span<double> primal, std::span<double> dual);

  [[nodiscard]] const MirrorMap& map() const noexcept { return map_; }
  [[nodiscard]] const L1Ball& ball() const noexcept { return ball_; }

 private:
  Stats project_origin(std::span<const double> theta, std::span<double> primal,
                       std::span<double> dual);
  Stats project_shifted(std::span<const double> theta, std::span<double> primal,
                        std::span<double> dual);

  MirrorMap map_;
  L1Ball ball_;
  std::vector<std::size_t> candidates_;
  std::vector<std::size_t> support_;
  std::vector<double> scratch_;
  double warm_r_ = 0.0;  ///< last dual norm found by the shifted search
};

struct ProjectedPoint {
  DenseVector primal;
  DenseVector dual;  ///< grad R(primal)
};

ProjectedPoint bregman_project_with_dual(const MirrorMap& map, const L1Ball& ball,
                                         const DenseVector& theta);
DenseVector bregman_project(const MirrorMap& map, const L1Ball& ball, const DenseVector& theta);

/// One mirror-descent step: project(grad R(w) - eta * g).
DenseVector md_step(const MirrorMap& map, const L1Ball& ball, const DenseVector& w,
                    const DenseVector& g, double eta);

}  // namespace slcomm
