#include "slcomm/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "numeric.hpp"
#include "slcomm/errors.hpp"
#include "slcomm/mirror.hpp"

namespace slcomm {

namespace {

constexpr std::uint64_t kOutputStream = 0x0a7;
constexpr std::uint64_t kMachineStream = 0x1000;

std::uint64_t ceil_positive(double x) {
  if (!std::isfinite(x) || x > 1e18) throw InvalidConfig("sample count overflows");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(x - 1e-9)));
}

BitCost dense_cost(std::size_t dim) { return {0, 64 * static_cast<std::uint64_t>(dim)}; }

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

}  // namespace

void ProtocolConfig::validate() const {
  if (dim == 0) throw InvalidConfig("dimension must be positive");
  if (machines == 0) throw InvalidConfig("machine count must be positive");
  if (examples == 0) throw InvalidConfig("example count must be positive");
  if (examples % machines != 0) {
    throw InvalidConfig("N = " + std::to_string(examples) + " is not divisible by m = " +
                        std::to_string(machines));
  }
  if (!(q >= 2.0) || !std::isfinite(q)) throw InvalidParameter("q must satisfy 2 <= q < inf");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidParameter("B must be positive");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidParameter("eta must be positive");
  if (transfer_samples > kMaxSamples || output_samples > kMaxSamples) {
    throw Unsupported("sample counts must fit in 32 bits");
  }
}

ProtocolConfig default_params_lipschitz(std::size_t dim, double q, double radius,
                                        double gradient_bound, std::size_t examples,
                                        std::size_t machines, const LipschitzDefaults& opts) {
  if (!(gradient_bound > 0.0)) throw InvalidParameter("gradient bound must be positive");
  if (examples == 0 || machines == 0) throw InvalidConfig("N and m must be positive");
  ProtocolConfig cfg;
  cfg.dim = dim;
  cfg.examples = examples;
  cfg.machines = machines;
  cfg.q = q;
  cfg.radius = radius;
  const double n = static_cast<double>(examples);
  cfg.step = (radius / gradient_bound) * std::sqrt(1.0 / (cfg.cq() * n));
  cfg.transfer_samples =
      ceil_positive(opts.kappa_s * std::pow(static_cast<double>(machines), 2.0 * (q - 1.0)));
  cfg.output_samples = opts.linear_model ? ceil_positive(opts.kappa_s0 * n)
                                         : ceil_positive(opts.kappa_s0 * std::pow(n, q / 2.0));
  cfg.validate();
  return cfg;
}

ProtocolConfig default_params_lipschitz(const InstanceInfo& info, std::size_t examples,
                                        std::size_t machines, const LipschitzDefaults& opts) {
  return default_params_lipschitz(info.dim, info.q, info.radius, info.gradient_bound, examples,
                                  machines, opts);
}

ProtocolConfig default_params_smooth(std::size_t dim, double q, double radius, double beta_q,
                                     double optimal_risk, std::size_t examples,
                                     std::size_t machines, double kappa_s) {
  if (!(beta_q > 0.0)) throw InvalidParameter("smoothness constant must be positive");
  if (!(optimal_risk >= 0.0)) throw InvalidParameter("optimal risk must be nonnegative");
  ProtocolConfig cfg;
  cfg.dim = dim;
  cfg.examples = examples;
  cfg.machines = machines;
  cfg.q = q;
  cfg.radius = radius;
  const double c = cfg.cq();
  const double n = static_cast<double>(examples);
  double eta = 1.0 / (4.0 * c * beta_q);
  double s0 = std::ceil(n / c);
  if (optimal_risk > 0.0) {
    eta = std::min(eta, std::sqrt(radius * radius / (c * beta_q * optimal_risk * n)));
    s0 = std::min(s0, std::ceil(std::sqrt(beta_q * radius * radius * n / (c * optimal_risk))));
  }
  cfg.step = eta;
  cfg.output_samples = ceil_positive(s0);
  cfg.transfer_samples =
      ceil_positive(kappa_s * std::pow(static_cast<double>(machines), 2.0 * (q - 1.0)));
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------

namespace detail {

std::vector<Segment> even_segments(std::size_t machines, std::size_t per_machine) {
  std::vector<Segment> segs(machines);
  for (std::size_t i = 0; i < machines; ++i) segs[i] = {i + 1, per_machine};
  return segs;
}

EngineOutput run_engine(ExampleSampler& data, const LinkFunction& link, const EngineParams& p,
                        const std::vector<Segment>& segments, const CounterRng& rng,
                        Channel& channel, const RunOptions& opts) {
  const std::size_t d = p.dim;
  const std::size_t total = std::accumulate(
      segments.begin(), segments.end(), std::size_t{0},
      [](std::size_t acc, const Segment& s) { return acc + s.steps; });
  if (total == 0) throw InvalidConfig("protocol has no examples to process");

  DenseVector center = p.center.empty() ? DenseVector(d) : p.center;
  if (center.size() != d) throw DimensionMismatch("engine: center has wrong dimension");
  const MirrorMap map = MirrorMap::from_dual_exponent(p.q, center);
  const L1Ball ball(p.radius);
  BregmanProjector projector(map, ball);
  const double cq = p.q - 1.0;

  CounterRng out_rng = rng.split(kOutputStream);
  const std::size_t pick = out_rng.uniform_index(total);

  DenseVector w = p.start.empty() ? center : p.start;
  if (w.size() != d) throw DimensionMismatch("engine: start point has wrong dimension");
  DenseVector dual = grad_reg(map, w);
  DenseVector theta(d);

  const DenseVector* comparator = opts.comparator;
  if (comparator != nullptr && comparator->size() != d) {
    throw DimensionMismatch("engine: comparator has wrong dimension");
  }

  EngineOutput out;
  RunTrace& trace = out.trace;
  DenseVector picked;
  DenseVector combined(d);
  double combined_weight = 0.0;
  Example ex;
  std::size_t global = 0;

  trace.max_l1_ratio = l1_norm(w.span()) / p.radius;

  for (std::size_t seg = 0; seg < segments.size(); ++seg) {
    const Segment& s = segments[seg];
    CounterRng machine_rng = rng.split(kMachineStream + s.machine);

    if (seg > 0) {
      const std::size_t from = segments[seg - 1].machine;
      CounterRng sender_rng = rng.split(kMachineStream + from).split(0x7a11 + seg);
      if (p.transfer_samples > 0) {
        const MaureyMessage sent = maurey(w, p.transfer_samples, sender_rng);
        const MaureyMessage got = channel.send(from, MessageKind::iterate, sent, p.round);
        w = decode(got, d);
        dual = grad_reg(map, w);
      } else {
        channel.send_raw(from, MessageKind::iterate, dense_cost(d), p.round);
      }
      trace.max_l1_ratio = std::max(trace.max_l1_ratio, l1_norm(w.span()) / p.radius);
    }

    RegretRecord rec;
    rec.machine = s.machine;
    rec.round = p.round;
    rec.step = p.step;
    rec.cq = cq;
    if (comparator != nullptr) rec.bregman_start = bregman(map, *comparator, w);

    DenseVector machine_sum;
    if (p.high_probability) machine_sum = DenseVector(d);

    for (std::size_t t = 0; t < s.steps; ++t, ++global) {
      data.next(ex);
      if (ex.x.size() != d) throw DimensionMismatch("engine: example has wrong dimension");
      if (global == pick) {
        picked = w;
        trace.output_machine = s.machine;
        trace.output_step = t + 1;
      }
      if (opts.record_iterates) trace.iterates.push_back(w);
      if (p.high_probability) machine_sum += w;

      const double a = dot(w.span(), ex.x.span());
      const double g = link.derivative(a, ex.y);
      if (comparator != nullptr) {
        const double xq = lp_norm(ex.x.span(), p.q);
        rec.linearized_regret += g * (a - dot(comparator->span(), ex.x.span()));
        rec.grad_sq_sum += g * g * xq * xq;
      }
      if (g != 0.0) {
        const double f = -p.step * g;
        const auto x = ex.x.span();
        for (std::size_t i = 0; i < d; ++i) theta[i] = dual[i] + f * x[i];
        const auto stats = projector.project(theta.span(), w.span(), dual.span());
        if (stats.active) ++trace.active_projections;
        trace.max_l1_ratio = std::max(trace.max_l1_ratio, l1_norm(w.span()) / p.radius);
      }
    }

    if (comparator != nullptr) {
      rec.bregman_end = bregman(map, *comparator, w);
      trace.regret.push_back(rec);
    }

    if (p.high_probability) {
      machine_sum *= 1.0 / static_cast<double>(s.steps);
      DenseVector avg = std::move(machine_sum);
      const bool last = seg + 1 == segments.size();
      if (p.output_samples > 0) {
        CounterRng avg_rng = machine_rng.split(0xa7e + p.round);
        const MaureyMessage msg = maurey(avg, p.output_samples, avg_rng);
        if (!last) {
          avg = decode(channel.send(s.machine, MessageKind::average, msg, p.round), d);
        } else {
          avg = decode(msg, d);
        }
      } else if (!last) {
        channel.send_raw(s.machine, MessageKind::average, dense_cost(d), p.round);
      }
      const double weight = static_cast<double>(s.steps);
      axpy(weight, avg.span(), combined.span());
      combined_weight += weight;
    }
  }

  if (p.high_probability) {
    combined *= 1.0 / combined_weight;
    out.estimate = std::move(combined);
  } else if (p.output_samples > 0) {
    const MaureyMessage msg = maurey(picked, p.output_samples, out_rng);
    out.estimate =
        decode(channel.send(trace.output_machine, MessageKind::output, msg, p.round), d);
  } else {
    out.estimate = std::move(picked);
  }
  return out;
}

}  // namespace detail

RunResult run_smd(ExampleSampler& data, const LinkFunction& link, const ProtocolConfig& cfg,
                  const CounterRng& rng, const RunOptions& opts) {
  cfg.validate();
  RunResult result;
  result.ledger = CommLedger(cfg.machines);
  Channel channel(cfg.dim, cfg.wire, result.ledger, cfg.materialize_limit);
  detail::EngineParams params;
  params.dim = cfg.dim;
  params.q = cfg.q;
  params.radius = cfg.radius;
  params.step = cfg.step;
  params.transfer_samples = cfg.transfer_samples;
  params.output_samples = cfg.output_samples;
  params.high_probability = cfg.high_probability;
  auto out = detail::run_engine(data, link, params,
                                detail::even_segments(cfg.machines, cfg.per_machine()), rng,
                                channel, opts);
  result.estimate = std::move(out.estimate);
  result.trace = std::move(out.trace);
  return result;
}

RunResult run_centralized_md(ExampleSampler& data, const LinkFunction& link,
                             const ProtocolConfig& cfg, const CounterRng& rng,
                             const RunOptions& opts) {
  ProtocolConfig central = cfg;
  central.machines = 1;
  central.transfer_samples = 0;
  central.output_samples = 0;
  return run_smd(data, link, central, rng, opts);
}

namespace {

/// Replays a fixed list of examples.
class StoredSampler final : public ExampleSampler {
 public:
  explicit StoredSampler(const std::vector<Example>& examples) : examples_(examples) {}
  void next(Example& out) override {
    if (pos_ >= examples_.size()) throw InvalidConfig("stored sampler exhausted");
    const Example& src = examples_[pos_++];
    if (out.x.size() != src.x.size()) out.x = DenseVector(src.x.size());
    std::copy(src.x.begin(), src.x.end(), out.x.begin());
    out.y = src.y;
  }

 private:
  const std::vector<Example>& examples_;
  std::size_t pos_ = 0;
};

}  // namespace

RunResult run_truncation_baseline(ExampleSampler& data, const LinkFunction& link,
                                  const ProtocolConfig& cfg, std::size_t keep,
                                  const CounterRng& rng) {
  cfg.validate();
  if (keep == 0) throw InvalidParameter("truncation must keep at least one coordinate");
  const std::size_t d = cfg.dim;
  const std::size_t k = std::min(keep, d);
  const std::uint64_t index_bits =
      d <= 1 ? 1U : static_cast<std::uint64_t>(std::bit_width(static_cast<std::uint64_t>(d - 1)));
  const std::size_t n = cfg.per_machine();

  RunResult result;
  result.ledger = CommLedger(cfg.machines);
  std::vector<Example> stored;
  stored.reserve(cfg.examples);
  std::vector<std::size_t> order(d);
  Example ex;
  for (std::size_t i = 1; i <= cfg.machines; ++i) {
    std::uint64_t bits = 0;
    for (std::size_t t = 0; t < n; ++t) {
      data.next(ex);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1),
                       order.end(), [&](std::size_t a, std::size_t b) {
                         return std::fabs(ex.x[a]) > std::fabs(ex.x[b]);
                       });
      Example trunc{DenseVector(d), ex.y};
      std::size_t kept = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const double v = ex.x[order[j]];
        if (v != 0.0) {
          trunc.x[order[j]] = v;
          ++kept;
        }
      }
      bits += 32 + kept * (index_bits + 64) + 64;
      stored.push_back(std::move(trunc));
    }
    result.ledger.record(i, MessageKind::examples, {0, bits});
  }

  StoredSampler replay(stored);
  RunResult central = run_centralized_md(replay, link, cfg, rng);
  result.estimate = std::move(central.estimate);
  result.trace = std::move(central.trace);
  return result;
}

}  // namespace slcomm
