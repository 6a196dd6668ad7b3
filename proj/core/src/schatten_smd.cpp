#include "slcomm/schatten_smd.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "slcomm/errors.hpp"
#include "slcomm/mirror.hpp"
#include "slcomm/sparsify.hpp"

namespace slcomm {

namespace {

constexpr std::uint64_t kOutputStream = 0x0a7;
constexpr std::uint64_t kMachineStream = 0x1000;

std::uint64_t ceil_positive(double x) {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(x - 1e-9)));
}

/// The current iterate in spectral form with its mirror image.
struct SpectralState {
  SvdResult basis;
  std::vector<double> primal;
  std::vector<double> dual;
};

SpectralState zero_state(std::size_t d) {
  SpectralState s{{DenseMatrix::identity(d), std::vector<double>(d, 0.0), DenseMatrix::identity(d)},
                  std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  return s;
}

}  // namespace

void SchattenConfig::validate() const {
  if (dim == 0 || examples == 0 || machines == 0) throw InvalidConfig("d, N and m must be positive");
  if (examples % machines != 0) {
    throw InvalidConfig("N = " + std::to_string(examples) + " is not divisible by m = " +
                        std::to_string(machines));
  }
  if (!(q >= 2.0) || !std::isfinite(q)) throw InvalidParameter("q must satisfy 2 <= q < inf");
  if (!(radius > 0.0)) throw InvalidParameter("B must be positive");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidParameter("eta must be positive");
  if (transfer_samples > kMaxSamples || output_samples > kMaxSamples) {
    throw Unsupported("sample counts must fit in 32 bits");
  }
}

SchattenConfig default_schatten_params(const InstanceInfo& info, std::size_t examples,
                                       std::size_t machines, double kappa_s, double kappa_s0) {
  SchattenConfig cfg;
  cfg.dim = info.dim;
  cfg.examples = examples;
  cfg.machines = machines;
  cfg.q = info.q;
  cfg.radius = info.radius;
  const double n = static_cast<double>(examples);
  const double cq = info.q - 1.0;
  cfg.step = (info.radius / info.gradient_bound) * std::sqrt(1.0 / (cq * n));
  cfg.transfer_samples =
      ceil_positive(kappa_s * std::pow(static_cast<double>(machines), 2.0 * cq));
  cfg.output_samples = ceil_positive(kappa_s0 * std::pow(n, info.q / 2.0));
  cfg.validate();
  return cfg;
}

MatrixRunResult run_schatten_smd(MatrixSampler& data, const LinkFunction& link,
                                 const SchattenConfig& cfg, const CounterRng& rng) {
  cfg.validate();
  const std::size_t d = cfg.dim;
  const std::size_t n = cfg.examples / cfg.machines;
  const SchattenMirrorMap map = SchattenMirrorMap::from_dual_exponent(cfg.q);
  const L1Ball ball(cfg.radius);
  BregmanProjector projector(MirrorMap::from_dual_exponent(cfg.q, DenseVector(d)), ball);

  MatrixRunResult result;
  result.ledger = CommLedger(cfg.machines);
  Channel channel(d, WireMode::rank, result.ledger);

  CounterRng out_rng = rng.split(kOutputStream);
  const std::size_t pick = out_rng.uniform_index(cfg.examples);

  SpectralState state = zero_state(d);
  SpectralState picked;
  DenseMatrix dual_matrix(d);
  MatrixExample ex;
  std::size_t global = 0;

  auto absorb_message = [&](const SpectralMessage& msg) {
    // The received atoms are orthonormal singular pairs, so the decoded
    // iterate and its mirror image are diagonal in the completed basis.
    SpectralState next = zero_state(d);
    if (!msg.is_zero()) {
      DenseMatrix u(d);
      DenseMatrix v(d);
      std::vector<double> sigma(d, 0.0);
      for (std::size_t k = 0; k < msg.atoms.size(); ++k) {
        for (std::size_t r = 0; r < d; ++r) {
          u(r, k) = msg.atoms[k].u[r];
          v(r, k) = msg.atoms[k].v[r];
        }
        sigma[k] = msg.scale * static_cast<double>(msg.atoms[k].count) /
                   static_cast<double>(msg.samples);
      }
      next.basis = {std::move(u), sigma, std::move(v)};
      next.primal = sigma;
      lp_duality_map(sigma, map.p(), next.dual);
    }
    return next;
  };

  for (std::size_t i = 1; i <= cfg.machines; ++i) {
    if (i > 1 && cfg.transfer_samples > 0) {
      CounterRng sender = rng.split(kMachineStream + (i - 1)).split(0x7a11 + (i - 1));
      const SpectralMessage msg =
          spectral_maurey(state.basis, state.primal, cfg.transfer_samples, sender);
      channel.send_spectral(i - 1, MessageKind::iterate, msg);
      state = absorb_message(msg);
    } else if (i > 1) {
      channel.send_raw(i - 1, MessageKind::iterate, {0, 64 * static_cast<std::uint64_t>(d * d)});
    }
    dual_matrix = state.basis.compose(state.dual);

    for (std::size_t t = 0; t < n; ++t, ++global) {
      data.next(ex);
      if (ex.x.dim() != d) throw DimensionMismatch("schatten smd: example has wrong dimension");
      const DenseMatrix w = state.basis.compose(state.primal);
      if (global == pick) {
        picked = state;
        result.output_machine = i;
        result.output_step = t + 1;
      }
      const double g = link.derivative(frobenius_dot(w, ex.x), ex.y);
      if (g == 0.0) continue;
      DenseMatrix theta = dual_matrix;
      const auto src = ex.x.flat();
      auto dst = theta.flat();
      for (std::size_t e = 0; e < dst.size(); ++e) dst[e] -= cfg.step * g * src[e];

      SpectralState next{svd(theta), std::vector<double>(d), std::vector<double>(d)};
      projector.project(next.basis.sigma, next.primal, next.dual);
      state = std::move(next);
      dual_matrix = state.basis.compose(state.dual);
      const double nuclear = std::accumulate(state.primal.begin(), state.primal.end(), 0.0);
      result.max_nuclear_ratio = std::max(result.max_nuclear_ratio, nuclear / cfg.radius);
    }
  }

  if (cfg.output_samples > 0) {
    const SpectralMessage msg =
        spectral_maurey(picked.basis, picked.primal, cfg.output_samples, out_rng);
    channel.send_spectral(result.output_machine, MessageKind::output, msg);
    result.estimate = decode(msg, d);
  } else {
    result.estimate = picked.basis.compose(picked.primal);
  }
  return result;
}

}  // namespace slcomm
