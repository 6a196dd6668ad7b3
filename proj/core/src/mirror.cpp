#include "slcomm/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "numeric.hpp"
#include "slcomm/errors.hpp"

namespace slcomm {

using detail::fast_pow;
using detail::sign_of;

namespace {

constexpr int kMaxProjectionSteps = 200;
constexpr double kProjectionTolerance = 1e-9;

void check_exponent(double p) {
  if (!(p > 1.0 && p <= 2.0)) {
    throw InvalidParameter("mirror map exponent must satisfy 1 < p <= 2, got " + std::to_string(p));
  }
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(want) +
                            ", got " + std::to_string(got));
  }
}

double l1_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

// Regula falsi with the Illinois modification on a decreasing function.
// f(lo) > 0 > f(hi) on entry. `accept` decides termination on the raw value.
struct Bracket {
  double lo;
  double hi;
  double flo;
  double fhi;
  int side = 0;

  double propose() const {
    const double x = (lo * fhi - hi * flo) / (fhi - flo);
    return x > lo && x < hi ? x : 0.5 * (lo + hi);
  }

  void update(double x, double fx) {
    if (fx > 0.0) {
      lo = x;
      flo = fx;
      if (side == 1) fhi *= 0.5;
      side = 1;
    } else {
      hi = x;
      fhi = fx;
      if (side == -1) flo *= 0.5;
      side = -1;
    }
  }

  [[nodiscard]] bool collapsed() const {
    return !(hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi));
  }
};

}  // namespace

// ---------------------------------------------------------------------------

MirrorMap::MirrorMap(double p, DenseVector center)
    : p_(p), q_(0.0), center_(std::move(center)), origin_(true) {
  check_exponent(p);
  if (center_.empty()) throw InvalidParameter("MirrorMap: center must be non-empty");
  if (!center_.all_finite()) throw InvalidParameter("MirrorMap: center must be finite");
  q_ = p == 2.0 ? 2.0 : p / (p - 1.0);
  origin_ = std::all_of(center_.begin(), center_.end(), [](double x) { return x == 0.0; });
}

MirrorMap MirrorMap::at_origin(double p, std::size_t dim) { return {p, DenseVector(dim)}; }

MirrorMap MirrorMap::from_dual_exponent(double q, DenseVector center) {
  if (!(q >= 2.0) || !std::isfinite(q)) {
    throw InvalidParameter("dual exponent must satisfy 2 <= q < inf, got " + std::to_string(q));
  }
  MirrorMap map(q == 2.0 ? 2.0 : q / (q - 1.0), std::move(center));
  map.q_ = q;
  return map;
}

double MirrorMap::value(const DenseVector& w) const {
  require_dim(w.size(), dim(), "MirrorMap::value");
  const double n = lp_norm(w - center_, p_);
  return 0.5 * n * n;
}

L1Ball::L1Ball(double radius) : radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidParameter("l1 ball radius must be positive and finite");
  }
}

bool L1Ball::contains(const DenseVector& w, double rel_tol) const {
  return l1_of(w.span()) <= radius_ * (1.0 + rel_tol);
}

void lp_duality_map(std::span<const double> t, double p, std::span<double> out) {
  require_dim(out.size(), t.size(), "lp_duality_map");
  if (p == 2.0) {
    std::copy(t.begin(), t.end(), out.begin());
    return;
  }
  const double n = lp_norm(t, p);
  if (n == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double inv = 1.0 / n;
  const double e = p - 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t[i];
    out[i] = x == 0.0 ? 0.0 : n * fast_pow(std::fabs(x) * inv, e) * sign_of(x);
  }
}

DenseVector grad_reg(const MirrorMap& map, const DenseVector& w) {
  require_dim(w.size(), map.dim(), "grad_reg");
  DenseVector out(w.size());
  if (map.centered_at_origin()) {
    lp_duality_map(w.span(), map.p(), out.span());
  } else {
    const DenseVector shifted = w - map.center();
    lp_duality_map(shifted.span(), map.p(), out.span());
  }
  return out;
}

DenseVector inv_grad_reg(const MirrorMap& map, const DenseVector& theta) {
  require_dim(theta.size(), map.dim(), "inv_grad_reg");
  DenseVector out(theta.size());
  lp_duality_map(theta.span(), map.q(), out.span());
  if (!map.centered_at_origin()) out += map.center();
  return out;
}

double bregman(const MirrorMap& map, const DenseVector& w, const DenseVector& w_prime) {
  require_dim(w.size(), map.dim(), "bregman");
  require_dim(w_prime.size(), map.dim(), "bregman");
  const DenseVector g = grad_reg(map, w_prime);
  const DenseVector diff = w - w_prime;
  const double value = map.value(w) - map.value(w_prime) - dot(g.span(), diff.span());
  return std::max(0.0, value);
}

// ---------------------------------------------------------------------------

BregmanProjector::BregmanProjector(MirrorMap map, L1Ball ball)
    : map_(std::move(map)), ball_(ball) {
  if (!map_.centered_at_origin()) {
    const auto& c = map_.center();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] != 0.0) support_.push_back(i);
    }
  }
}

BregmanProjector::Stats BregmanProjector::project(std::span<const double> theta,
                                                  std::span<double> primal,
                                                  std::span<double> dual) {
  require_dim(theta.size(), map_.dim(), "bregman_project");
  require_dim(primal.size(), map_.dim(), "bregman_project");
  require_dim(dual.size(), map_.dim(), "bregman_project");
  for (double x : theta) {
    if (!std::isfinite(x)) throw InvalidParameter("bregman_project: non-finite dual point");
  }
  return map_.centered_at_origin() ? project_origin(theta, primal, dual)
                                   : project_shifted(theta, primal, dual);
}

BregmanProjector::Stats BregmanProjector::project_origin(std::span<const double> theta,
                                                         std::span<double> primal,
                                                         std::span<double> dual) {
  const double q = map_.q();
  const double radius = ball_.radius();

  lp_duality_map(theta, q, primal);
  const double unconstrained = l1_of(primal);
  if (unconstrained <= radius) {
    std::copy(theta.begin(), theta.end(), dual.begin());
    return {};
  }

  candidates_.clear();
  double amax = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double a = std::fabs(theta[i]);
    if (a > 0.0) {
      candidates_.push_back(i);
      amax = std::max(amax, a);
    }
  }

  if (q == 2.0) {
    // Euclidean case: the threshold has a closed form once the active set is
    // known, and shrinking the set from above settles it in a few passes.
    double lambda = 0.0;
    int passes = 0;
    for (bool changed = true; changed; ++passes) {
      double sum = 0.0;
      for (std::size_t i : candidates_) sum += std::fabs(theta[i]);
      lambda = std::max(0.0, (sum - radius) / static_cast<double>(candidates_.size()));
      const std::size_t before = candidates_.size();
      std::erase_if(candidates_, [&](std::size_t i) { return std::fabs(theta[i]) <= lambda; });
      changed = candidates_.size() != before;
    }
    std::fill(primal.begin(), primal.end(), 0.0);
    std::fill(dual.begin(), dual.end(), 0.0);
    for (std::size_t i : candidates_) {
      const double t = std::fabs(theta[i]) - lambda;
      dual[i] = sign_of(theta[i]) * t;
      primal[i] = dual[i];
    }
    return {lambda, passes, true};
  }

  const double qm1 = q - 1.0;
  const double outer_exp = (2.0 - q) / q;
  auto l1_at = [&](double lam) {
    double sum_q = 0.0;
    double sum_qm1 = 0.0;
    for (std::size_t i : candidates_) {
      const double t = std::fabs(theta[i]) - lam;
      if (t > 0.0) {
        const double tq1 = fast_pow(t, qm1);
        sum_qm1 += tq1;
        sum_q += tq1 * t;
      }
    }
    if (sum_qm1 == 0.0) return 0.0;
    return fast_pow(sum_q, outer_exp) * sum_qm1;
  };
  auto filter = [&](double lo) {
    std::erase_if(candidates_, [&](std::size_t i) { return std::fabs(theta[i]) <= lo; });
  };

  Bracket br{0.0, amax, unconstrained - radius, -radius};
  double hi_true = -radius;
  double lambda = amax;
  int it = 0;
  bool done = false;
  for (; it < kMaxProjectionSteps && !done; ++it) {
    if (br.collapsed()) {
      lambda = br.hi;
      done = hi_true >= -kProjectionTolerance * radius;
      break;
    }
    const double x = br.propose();
    const double fx = l1_at(x) - radius;
    if (fx <= 0.0 && fx >= -kProjectionTolerance * radius) {
      lambda = x;
      done = true;
    } else {
      br.update(x, fx);
      if (fx > 0.0) {
        filter(br.lo);
      } else {
        hi_true = fx;
      }
    }
  }
  if (!done) throw NumericalFailure("bregman_project: multiplier search did not converge");

  double sum_q = 0.0;
  std::fill(primal.begin(), primal.end(), 0.0);
  std::fill(dual.begin(), dual.end(), 0.0);
  for (std::size_t i : candidates_) {
    const double t = std::fabs(theta[i]) - lambda;
    if (t > 0.0) {
      const double s = sign_of(theta[i]);
      const double tq1 = fast_pow(t, qm1);
      sum_q += tq1 * t;
      primal[i] = s * tq1;
      dual[i] = s * t;
    }
  }
  const double scale = sum_q > 0.0 ? fast_pow(sum_q, outer_exp) : 0.0;
  for (std::size_t i : candidates_) primal[i] *= scale;
  return {lambda, it, true};
}

BregmanProjector::Stats BregmanProjector::project_shifted(std::span<const double> theta,
                                                          std::span<double> primal,
                                                          std::span<double> dual) {
  const double q = map_.q();
  const double p = map_.p();
  const double qm1 = q - 1.0;
  const double pm1 = p - 1.0;
  const double radius = ball_.radius();
  const auto& center = map_.center();

  lp_duality_map(theta, q, primal);
  double unconstrained = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    primal[i] += center[i];
    unconstrained += std::fabs(primal[i]);
  }
  if (unconstrained <= radius) {
    std::copy(theta.begin(), theta.end(), dual.begin());
    return {};
  }

  // grad R at w = 0, which bounds the multiplier that zeroes every coordinate.
  scratch_.assign(center.size(), 0.0);
  {
    std::vector<double> neg(center.begin(), center.end());
    for (double& x : neg) x = -x;
    lp_duality_map(neg, p, scratch_);
  }
  double lambda_max = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    lambda_max = std::max(lambda_max, std::fabs(theta[i] - scratch_[i]));
  }

  std::vector<bool> in_support(theta.size(), false);
  for (std::size_t i : support_) in_support[i] = true;
  candidates_.clear();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!in_support[i] && theta[i] != 0.0) candidates_.push_back(i);
  }

  const std::size_t k = support_.size();
  std::vector<double> z(k);
  // On the support of the center, the unclamped dual coordinate is
  // -sign(c_i) |c_i|^{p-1} r^e with e = (q-2)/(q-1).
  std::vector<double> th(k);
  std::vector<double> base(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = support_[j];
    th[j] = theta[i];
    base[j] = -sign_of(center[i]) * fast_pow(std::fabs(center[i]), pm1);
  }
  const double e = (q - 2.0) / qm1;
  auto pow_q = [q](double x) { return q == 3.0 ? x * x * x : fast_pow(x, q); };
  std::vector<double> base_q(k);
  for (std::size_t j = 0; j < k; ++j) base_q[j] = pow_q(std::fabs(base[j]));

  struct Eval {
    double l1;
    double r;
  };

  // Solves r = ||z(r)||_q for the given multiplier and returns ||w||_1.
  auto evaluate = [&](double lam) -> Eval {
    double off_q = 0.0;
    double off_qm1 = 0.0;
    for (std::size_t i : candidates_) {
      const double t = std::fabs(theta[i]) - lam;
      if (t > 0.0) {
        const double tq1 = fast_pow(t, qm1);
        off_qm1 += tq1;
        off_q += tq1 * t;
      }
    }

    // Returns sum |z_j|^q plus the off-support mass, and the sum of
    // |c_j|^{q(p-1)} over unclamped coordinates (for the derivative).
    auto fill_z = [&](double rho) {
      double clamped = 0.0;
      double free_mass = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double z0 = base[j] * rho;
        const double lo = th[j] - lam;
        const double hi = th[j] + lam;
        if (z0 < lo) {
          z[j] = lo;
          clamped += pow_q(std::fabs(lo));
        } else if (z0 > hi) {
          z[j] = hi;
          clamped += pow_q(std::fabs(hi));
        } else {
          z[j] = z0;
          free_mass += base_q[j];
        }
      }
      return std::pair{off_q + clamped + free_mass * pow_q(rho), free_mass};
    };

    double r = 0.0;
    if (q == 2.0) {
      const double acc = fill_z(1.0).first;
      r = acc > 0.0 ? std::sqrt(acc) : 0.0;
    } else if (k > 0 || off_q > 0.0) {
      // Solve S(r) = r^q where S(r) = ||z(r)||_q^q. r = 0 is always a root
      // when the center is nonzero but it is spurious; S(r) > r^q just right
      // of it. The previous solution is a good starting point and the upper
      // bracket ||(|theta| + lambda)||_q is computed once r is known too small.
      double lo = 0.0;
      double hi = std::numeric_limits<double>::infinity();
      auto upper_bound = [&] {
        double hi_acc = off_q;
        for (std::size_t j = 0; j < k; ++j) hi_acc += fast_pow(std::fabs(th[j]) + lam, q);
        return fast_pow(hi_acc, 1.0 / q) * (1.0 + 1e-12);
      };
      r = warm_r_ > 0.0 ? warm_r_ : upper_bound();
      // Newton in log r: phi(u) = log S(e^u) - q u is smooth and decreasing.
      for (int j = 0; j < 200; ++j) {
        const double rho = fast_pow(r, e);
        const auto [acc, free_mass] = fill_z(rho);
        const double phi = std::log(acc) - q * std::log(r);
        if (phi == 0.0) break;
        if (phi > 0.0) {
          lo = r;
          if (std::isinf(hi)) hi = std::max(upper_bound(), 2.0 * lo);
        } else {
          hi = r;
        }
        const double dphi = q * e * free_mass * pow_q(rho) / acc - q;
        double next = r * std::exp(-phi / dphi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const bool small =
            std::fabs(next - r) <= 1e-15 * r || (!std::isinf(hi) && hi - lo <= 1e-15 * hi);
        r = next;
        if (small) break;
      }
      warm_r_ = r;
      fill_z(fast_pow(r, e));
    }

    if (r == 0.0) return {l1_of(std::span<const double>(center.data(), center.size())), 0.0};
    const double c = q == 2.0 ? 1.0 : fast_pow(r, 2.0 - q);
    double l1 = c * off_qm1;
    for (std::size_t j = 0; j < k; ++j) {
      const double zi = z[j];
      l1 += std::fabs(center[support_[j]] + c * sign_of(zi) * fast_pow(std::fabs(zi), qm1));
    }
    // Coordinates outside the support and the candidate set are zero.
    return {l1, r};
  };

  auto filter = [&](double lo) {
    std::erase_if(candidates_, [&](std::size_t i) { return std::fabs(theta[i]) <= lo; });
  };

  Bracket br{0.0, lambda_max, unconstrained - radius, -radius};
  double hi_true = -radius;
  double lambda = lambda_max;
  double last_x = -1.0;
  Eval last_eval{0.0, 0.0};
  int it = 0;
  bool done = false;
  for (; it < kMaxProjectionSteps && !done; ++it) {
    if (br.collapsed()) {
      lambda = br.hi;
      done = hi_true >= -kProjectionTolerance * radius;
      break;
    }
    const double x = br.propose();
    last_eval = evaluate(x);
    last_x = x;
    const double fx = last_eval.l1 - radius;

    if (fx <= 0.0 && fx >= -kProjectionTolerance * radius) {
      lambda = x;
      done = true;
    } else {
      br.update(x, fx);
      if (fx > 0.0) {
        filter(br.lo);
      } else {
        hi_true = fx;
      }
    }
  }
  if (!done) throw NumericalFailure("bregman_project: multiplier search did not converge");

  const Eval final_eval = lambda == last_x ? last_eval : evaluate(lambda);
  std::fill(primal.begin(), primal.end(), 0.0);
  std::fill(dual.begin(), dual.end(), 0.0);
  const double r = final_eval.r;
  if (r == 0.0) {
    std::copy(center.begin(), center.end(), primal.begin());
    for (std::size_t j = 0; j < k; ++j) dual[support_[j]] = z[j];
    return {lambda, it, true};
  }
  const double c = q == 2.0 ? 1.0 : fast_pow(r, 2.0 - q);
  for (std::size_t i : candidates_) {
    const double t = std::fabs(theta[i]) - lambda;
    if (t > 0.0) {
      const double s = sign_of(theta[i]);
      primal[i] = c * s * fast_pow(t, qm1);
      dual[i] = s * t;
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = support_[j];
    const double zi = z[j];
    primal[i] = center[i] + c * sign_of(zi) * fast_pow(std::fabs(zi), qm1);
    dual[i] = zi;
  }
  return {lambda, it, true};
}

ProjectedPoint bregman_project_with_dual(const MirrorMap& map, const L1Ball& ball,
                                         const DenseVector& theta) {
  BregmanProjector projector(map, ball);
  ProjectedPoint out{DenseVector(map.dim()), DenseVector(map.dim())};
  projector.project(theta.span(), out.primal.span(), out.dual.span());
  return out;
}

DenseVector bregman_project(const MirrorMap& map, const L1Ball& ball, const DenseVector& theta) {
  return bregman_project_with_dual(map, ball, theta).primal;
}

DenseVector md_step(const MirrorMap& map, const L1Ball& ball, const DenseVector& w,
                    const DenseVector& g, double eta) {
  require_dim(g.size(), map.dim(), "md_step");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidParameter("md_step: eta must be positive");
  DenseVector theta = grad_reg(map, w);
  axpy(-eta, g.span(), theta.span());
  return bregman_project(map, ball, theta);
}

}  // namespace slcomm
