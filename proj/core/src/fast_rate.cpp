#include "slcomm/fast_rate.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "slcomm/errors.hpp"

namespace slcomm {

void FastRateConfig::validate() const {
  if (dim == 0) throw InvalidConfig("dimension must be positive");
  if (machines == 0 || examples == 0) throw InvalidConfig("N and m must be positive");
  if (examples % machines != 0) {
    throw InvalidConfig("N = " + std::to_string(examples) + " is not divisible by m = " +
                        std::to_string(machines));
  }
  if (!(q >= 2.0) || !std::isfinite(q)) throw InvalidParameter("q must satisfy 2 <= q < inf");
  if (!(radius > 0.0) || !(gradient_bound > 0.0) || !(rsc > 0.0) || !(c > 0.0)) {
    throw InvalidParameter("B_1, R_q, gamma_q and c must be positive");
  }
  if (!(kappa_s > 0.0) || !(kappa_s0 > 0.0)) throw InvalidParameter("kappas must be positive");
}

double fast_rate_radius(double b1, long j) {
  return b1 * std::pow(2.0, -0.5 * static_cast<double>(j));
}

std::vector<FastRateRound> fast_rate_schedule(const FastRateConfig& cfg) {
  cfg.validate();
  const double cq = cfg.q - 1.0;
  const std::size_t n = cfg.examples / cfg.machines;
  std::vector<FastRateRound> rounds;
  std::size_t used = 0;
  for (long k = 1;; ++k) {
    const double b_prev2 = fast_rate_radius(cfg.radius, k - 2);
    const double ratio = 4.0 * cfg.c * cfg.gradient_bound / (cfg.rsc * b_prev2);
    const double nk_real = std::ceil(cq * ratio * ratio - 1e-9);
    const double nk_clamped = std::max(1.0, nk_real);
    if (nk_clamped > static_cast<double>(cfg.examples - used)) break;
    const auto nk = static_cast<std::size_t>(nk_clamped);

    FastRateRound r;
    r.index = static_cast<std::size_t>(k);
    r.examples = nk;
    r.first_example = used;
    r.radius_bar = fast_rate_radius(cfg.radius, k - 1);
    const std::size_t first_machine = used / n;
    const std::size_t last_machine = (used + nk - 1) / n;
    r.machines_touched = last_machine - first_machine + 1;
    const double nkd = static_cast<double>(nk);
    const double shrink = cfg.radius / r.radius_bar;
    r.step = (r.radius_bar / cfg.gradient_bound) * std::sqrt(1.0 / (cq * nkd));
    r.transfer_samples = static_cast<std::uint64_t>(
        std::ceil(cfg.kappa_s * std::pow(static_cast<double>(r.machines_touched), 2.0 * cq) *
                      std::pow(shrink, 4.0 * cq) -
                  1e-9));
    r.output_samples = static_cast<std::uint64_t>(std::ceil(
        cfg.kappa_s0 * std::pow(nkd / cq, cfg.q / 2.0) * std::pow(shrink, cfg.q) - 1e-9));
    if (r.transfer_samples > kMaxSamples || r.output_samples > kMaxSamples) {
      throw Unsupported("fast-rate round " + std::to_string(k) +
                        " needs more samples than the 32-bit header allows");
    }
    r.transfer_samples = std::max<std::uint64_t>(1, r.transfer_samples);
    r.output_samples = std::max<std::uint64_t>(1, r.output_samples);
    rounds.push_back(r);
    used += nk;
  }
  if (rounds.empty()) {
    throw InvalidConfig("fast-rate schedule has no complete round: N_1 exceeds N = " +
                        std::to_string(cfg.examples));
  }
  return rounds;
}

FastRunResult run_fast_smd(ExampleSampler& data, const LinkFunction& link,
                           const FastRateConfig& cfg, const CounterRng& rng,
                           const RunOptions& opts) {
  FastRunResult result;
  result.rounds = fast_rate_schedule(cfg);
  result.ledger = CommLedger(cfg.machines);
  Channel channel(cfg.dim, cfg.wire, result.ledger, cfg.materialize_limit);
  const std::size_t n = cfg.examples / cfg.machines;

  DenseVector center(cfg.dim);
  for (const FastRateRound& r : result.rounds) {
    std::vector<detail::Segment> segments;
    std::size_t pos = r.first_example;
    const std::size_t end = r.first_example + r.examples;
    while (pos < end) {
      const std::size_t machine = pos / n;
      const std::size_t stop = std::min(end, (machine + 1) * n);
      segments.push_back({machine + 1, stop - pos});
      pos = stop;
    }

    detail::EngineParams params;
    params.dim = cfg.dim;
    params.q = cfg.q;
    params.radius = cfg.radius;
    params.step = r.step;
    params.transfer_samples = r.transfer_samples;
    params.output_samples = r.output_samples;
    params.round = r.index;
    params.center = center;
    params.start = center;
    auto out = detail::run_engine(data, link, params, segments, rng.split(r.index), channel, opts);
    center = out.estimate;
    result.round_outputs.push_back(out.estimate);
    result.traces.push_back(std::move(out.trace));
  }
  result.estimate = std::move(center);
  return result;
}

}  // namespace slcomm
