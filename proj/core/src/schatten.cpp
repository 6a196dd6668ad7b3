#include "slcomm/schatten.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slcomm/errors.hpp"

namespace slcomm {

namespace {

void check_exponent(double p) {
  if (!(p > 1.0 && p <= 2.0)) {
    throw InvalidParameter("Schatten mirror map exponent must satisfy 1 < p <= 2, got " +
                           std::to_string(p));
  }
}

DenseMatrix spectral_apply(const DenseMatrix& m, double exponent) {
  const SvdResult res = svd(m);
  std::vector<double> mapped(res.sigma.size());
  lp_duality_map(res.sigma, exponent, mapped);
  return res.compose(mapped);
}

}  // namespace

SchattenMirrorMap::SchattenMirrorMap(double p) : p_(p), q_(0.0) {
  check_exponent(p);
  q_ = p == 2.0 ? 2.0 : p / (p - 1.0);
}

SchattenMirrorMap SchattenMirrorMap::from_dual_exponent(double q) {
  if (!(q >= 2.0) || !std::isfinite(q)) {
    throw InvalidParameter("dual exponent must satisfy 2 <= q < inf");
  }
  SchattenMirrorMap map(q == 2.0 ? 2.0 : q / (q - 1.0));
  map.q_ = q;
  return map;
}

double SchattenMirrorMap::value(const DenseMatrix& w) const {
  const double n = schatten_norm(w, p_);
  return 0.5 * n * n;
}

DenseMatrix grad_reg(const SchattenMirrorMap& map, const DenseMatrix& w) {
  return spectral_apply(w, map.p());
}

DenseMatrix inv_grad_reg(const SchattenMirrorMap& map, const DenseMatrix& theta) {
  return spectral_apply(theta, map.q());
}

double bregman(const SchattenMirrorMap& map, const DenseMatrix& w, const DenseMatrix& w_prime) {
  if (w.dim() != w_prime.dim()) throw DimensionMismatch("bregman: matrix sizes differ");
  const DenseMatrix g = grad_reg(map, w_prime);
  const double value = map.value(w) - map.value(w_prime) - frobenius_dot(g, w - w_prime);
  return std::max(0.0, value);
}

SpectralPoint bregman_project(const SchattenMirrorMap& map, const L1Ball& ball,
                              const DenseMatrix& theta) {
  SpectralPoint out{svd(theta), {}, {}};
  const std::size_t d = theta.dim();
  out.primal_sigma.assign(d, 0.0);
  out.dual_sigma.assign(d, 0.0);
  BregmanProjector projector(MirrorMap::from_dual_exponent(map.q(), DenseVector(d)), ball);
  projector.project(out.basis.sigma, out.primal_sigma, out.dual_sigma);
  return out;
}

}  // namespace slcomm
