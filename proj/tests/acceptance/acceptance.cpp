// Acceptance suite. Each criterion prints its measurements followed by a single
// "PASS"/"FAIL" line. Pass criterion numbers on the command line to run a
// subset, e.g. `slcomm_acceptance 1 9`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "slcomm/datagen.hpp"
#include "slcomm/errors.hpp"
#include "slcomm/fast_rate.hpp"
#include "slcomm/harness.hpp"
#include "slcomm/jl_ogd.hpp"
#include "slcomm/mirror.hpp"
#include "slcomm/protocols.hpp"
#include "slcomm/rng.hpp"
#include "slcomm/schatten_smd.hpp"
#include "slcomm/sparsify.hpp"

using namespace slcomm;

namespace {

struct Verdict {
  bool pass = true;

  void require(bool ok, const char* what) {
    if (!ok) {
      std::printf("    violated: %s\n", what);
      pass = false;
    }
  }
};

/// Worst regret slack over every mirror-descent run of the suite.
struct RegretLog {
  std::size_t runs = 0;
  std::size_t records = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;

  void add(const RunTrace& trace) {
    ++runs;
    for (const RegretRecord& r : trace.regret) {
      ++records;
      const double slack = r.slack();
      worst_slack = std::min(worst_slack, slack);
      if (slack < -1e-8) ++violations;
    }
  }
};

RegretLog g_regret;

double mean(const std::vector<double>& v) { return oracle::mean_se(v).mean; }

std::vector<double> to_doubles(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

std::vector<double> random_vector(std::size_t d, CounterRng& rng, double scale = 1.0) {
  std::vector<double> v(d);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

/// Plain double-precision lp distance, kept separate from the library norms.
double lp_distance(const DenseVector& a, const std::vector<double>& b, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) acc += std::pow(std::fabs(a[i] - b[i]), p);
  return std::pow(acc, 1.0 / p);
}

void require_suite(const std::string& module, Verdict& v) {
  bool all = true;
  for (const CheckResult& r : verify_module(module, 2024)) {
    std::printf("    %s  %-60s cases=%zu worst_ratio=%.4g\n", r.passed ? "ok  " : "FAIL",
                r.name.c_str(), r.cases, r.worst_ratio);
    all = all && r.passed;
  }
  v.require(all, (module + " suite").c_str());
}

// ---------------------------------------------------------------------------

Verdict geometry() {
  Verdict v;
  require_suite("mirror", v);

  CounterRng rng(101);
  std::size_t duality_bad = 0, roundtrip_bad = 0, convex_bad = 0, cases = 0;
  for (double p : {1.25, 1.5, 1.75, 2.0}) {
    const double q = p / (p - 1.0);
    for (int c = 0; c < 1000; ++c, ++cases) {
      const std::size_t d = 1 + rng.uniform_index(12);
      const auto center = c % 2 == 0 ? std::vector<double>(d, 0.0) : random_vector(d, rng, 0.3);
      const MirrorMap map(p, DenseVector(center));
      const auto w = random_vector(d, rng);
      const DenseVector g = grad_reg(map, DenseVector(w));
      std::vector<double> shifted(d);
      for (std::size_t i = 0; i < d; ++i) shifted[i] = w[i] - center[i];
      const double lhs = oracle::lp_norm(g.values(), q);
      const double rhs = oracle::lp_norm(shifted, p);
      if (std::fabs(lhs - rhs) > 1e-10 * std::max(rhs, 1e-300)) ++duality_bad;

      // With a shifted center, tiny dual entries vanish when the center is
      // added back, so that case is checked in the primal direction only.
      const auto theta = random_vector(d, rng);
      const bool origin = c % 2 == 0;
      const DenseVector back = origin ? grad_reg(map, inv_grad_reg(map, DenseVector(theta)))
                                      : inv_grad_reg(map, grad_reg(map, DenseVector(theta)));
      for (std::size_t i = 0; i < d; ++i) {
        if (std::fabs(back[i] - theta[i]) > 1e-8 * (1.0 + std::fabs(theta[i]))) {
          ++roundtrip_bad;
          break;
        }
      }
      if (origin) {
        const DenseVector primal = inv_grad_reg(map, grad_reg(map, DenseVector(theta)));
        for (std::size_t i = 0; i < d; ++i) {
          if (std::fabs(primal[i] - theta[i]) > 1e-8 * (1.0 + std::fabs(theta[i]))) {
            ++roundtrip_bad;
            break;
          }
        }
      }

      const auto a = random_vector(d, rng);
      const auto b = random_vector(d, rng);
      std::vector<double> diff(d);
      for (std::size_t i = 0; i < d; ++i) diff[i] = a[i] - b[i];
      const double n = oracle::lp_norm(diff, p);
      const double div = bregman(map, DenseVector(a), DenseVector(b));
      if (div < 0.5 * (p - 1.0) * n * n * (1.0 - 1e-12) - 1e-14) ++convex_bad;
    }
  }
  std::printf("    oracle cross-check over %zu cases: duality %zu, roundtrip %zu, strong convexity %zu "
              "violations\n",
              cases, duality_bad, roundtrip_bad, convex_bad);
  v.require(duality_bad == 0, "duality identity (1e-10 rel.)");
  v.require(roundtrip_bad == 0, "inverse-link roundtrip (1e-8)");
  v.require(convex_bad == 0, "strong convexity (p-1)/2");
  return v;
}

Verdict maurey_suite() {
  Verdict v;
  require_suite("maurey", v);

  // Independent Monte-Carlo with 10^4 draws per (p, s).
  CounterRng rng(202);
  const std::size_t d = 24;
  std::vector<double> w = random_vector(d, rng);
  w[3] = 0.0;
  double l1 = 0.0;
  for (double x : w) l1 += std::fabs(x);
  const DenseVector wv(w);
  constexpr int kTrials = 10000;
  for (std::uint64_t s : {16U, 64U, 256U}) {
    std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
    std::map<double, double> err;
    for (int t = 0; t < kTrials; ++t) {
      const DenseVector q = decode(maurey(wv, s, rng), d);
      for (std::size_t i = 0; i < d; ++i) {
        sum[i] += q[i];
        sumsq[i] += q[i] * q[i];
      }
      for (double p : {1.25, 1.5, 2.0}) err[p] += lp_distance(q, w, p);
    }
    double worst_z = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double m = sum[i] / kTrials;
      const double var = std::max(0.0, sumsq[i] / kTrials - m * m);
      const double se = std::sqrt(var / kTrials);
      const double dev = std::fabs(m - w[i]);
      worst_z = std::max(worst_z, se > 0.0 ? dev / se : (dev > 1e-12 ? 1e9 : 0.0));
    }
    std::printf("    s=%-4llu unbiasedness worst |z| = %.3f", static_cast<unsigned long long>(s), worst_z);
    v.require(worst_z <= 3.0, "unbiasedness within Monte-Carlo error");
    for (double p : {1.25, 1.5, 2.0}) {
      const double bound = 4.0 * l1 * std::pow(static_cast<double>(s), -(1.0 - 1.0 / p));
      const double ratio = err[p] / kTrials / bound;
      std::printf("  p=%.2f ratio=%.3f", p, ratio);
      v.require(ratio <= 1.0, "expected lp error bound");
    }
    std::printf("\n");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Slow-rate scaling on the l1/l2 instance.

Verdict slow_rate() {
  Verdict v;
  L1LqOptions o;
  o.dim = 10000;
  o.q = 2.0;
  o.radius = 1.0;
  o.feature_norm = 1.0;
  o.noise = 0.5;
  o.sparsity = 4;
  o.law = FeatureLaw::signal_block;
  o.signal_mass = 0.5;
  const auto inst = gen_l1lq(o, 7);
  const InstanceInfo& info = inst->info();
  const std::size_t machines = 8;
  const std::vector<std::size_t> sizes{1024, 2048, 4096, 8192};
  constexpr std::size_t kTrials = 50;
  const std::uint64_t code_width = static_cast<std::uint64_t>(std::ceil(std::log2(2.0 * o.dim)));

  std::vector<double> means;
  double worst_kappa = 0.0;
  std::size_t cost_mismatches = 0;
  std::map<std::uint64_t, std::uint64_t> payload_cache;
  auto rank_bits = [&](std::uint64_t s) {
    auto it = payload_cache.find(s);
    if (it == payload_cache.end()) {
      it = payload_cache.emplace(s, oracle::ceil_log2(oracle::binomial(2 * o.dim + s - 1, s))).first;
    }
    return it->second;
  };

  for (std::size_t n : sizes) {
    const ProtocolConfig cfg = default_params_lipschitz(info, n, machines, {4.0, 1.0, true});
    std::vector<double> smd, central;
    for (std::size_t t = 0; t < kTrials; ++t) {
      const std::uint64_t data_seed = CounterRng(41, n).split(t)();
      const CounterRng rng = CounterRng(42, n).split(t);
      RunOptions opts;
      opts.comparator = &inst->optimum();

      auto data = inst->sampler(data_seed);
      const RunResult r = run_smd(*data, inst->link(), cfg, rng, opts);
      g_regret.add(r.trace);
      smd.push_back(inst->excess_risk(r.estimate));

      std::uint64_t simple = 0;
      for (const LedgerEntry& e : r.ledger.entries()) {
        const std::uint64_t s =
            e.kind == MessageKind::output ? cfg.output_samples : cfg.transfer_samples;
        if (e.cost.header_bits != kMessageHeaderBits || e.cost.payload_bits != rank_bits(s)) {
          ++cost_mismatches;
        }
        simple += s * code_width;
      }
      worst_kappa = std::max(worst_kappa, static_cast<double>(r.ledger.total_bits()) /
                                              static_cast<double>(simple));

      auto data2 = inst->sampler(data_seed);
      const RunResult c = run_centralized_md(*data2, inst->link(), cfg, rng, opts);
      g_regret.add(c.trace);
      central.push_back(inst->excess_risk(c.estimate));
    }
    const double m = mean(smd);
    const double mc = mean(central);
    const double target = 3.0 * std::sqrt(cfg.cq() / static_cast<double>(n));
    std::printf("    N=%-5zu s=%llu s0=%llu  smd %.5f  centralized %.5f  ratio %.2f  bound %.4f\n", n,
                static_cast<unsigned long long>(cfg.transfer_samples),
                static_cast<unsigned long long>(cfg.output_samples), m, mc, m / mc, target);
    v.require(m <= target, "mean excess risk <= 3 sqrt(C/N)");
    v.require(m <= 2.0 * mc, "within 2x of centralized");
    means.push_back(m);
  }
  const double slope = oracle::loglog_slope(to_doubles(sizes), means);
  std::printf("    slope %.3f  worst kappa %.3f  cost mismatches vs big-integer oracle %zu\n", slope,
              worst_kappa, cost_mismatches);
  v.require(slope >= -0.65 && slope <= -0.35, "slope in [-0.65, -0.35]");
  v.require(worst_kappa <= 8.0, "bits within kappa <= 8 of s log2(2d) per message");
  v.require(cost_mismatches == 0, "every message costs header + ceil(log2 C(2d+s-1, s))");
  return v;
}

// ---------------------------------------------------------------------------
// Fast rate on sparse regression.

Verdict fast_rate() {
  Verdict v;
  SparseRegressionOptions o;
  o.dim = 4096;
  o.sparsity = 4;
  o.magnitude = 0.2;
  o.q = 3.0;
  o.noise = 0.2;
  const auto inst = gen_sparse_regression(o, 21);
  const InstanceInfo& info = inst->info();
  const std::size_t machines = 4;
  const double gradient_bound = 16.0;
  const std::vector<std::size_t> sizes{1024, 2048, 4096, 8192, 16384};
  constexpr std::size_t kTrials = 50;

  FastRateConfig fc;
  fc.dim = info.dim;
  fc.machines = machines;
  fc.q = info.q;
  fc.radius = info.radius;
  fc.gradient_bound = gradient_bound;
  fc.rsc = info.rsc;
  fc.c = 0.0177;

  RunOptions opts;
  opts.comparator = &inst->optimum();
  std::vector<double> means;
  std::vector<double> fast_last, slow_last;
  for (std::size_t n : sizes) {
    fc.examples = n;
    std::vector<double> risks;
    std::size_t rounds = 0;
    for (std::size_t t = 0; t < kTrials; ++t) {
      const std::uint64_t data_seed = CounterRng(51, n).split(t)();
      const CounterRng rng = CounterRng(52, n).split(t);
      auto data = inst->sampler(data_seed);
      const FastRunResult r = run_fast_smd(*data, inst->link(), fc, rng, opts);
      for (const RunTrace& tr : r.traces) g_regret.add(tr);
      rounds = r.rounds.size();
      risks.push_back(inst->excess_risk(r.estimate));

      if (n == sizes.back()) {
        fast_last.push_back(risks.back());
        const ProtocolConfig sc =
            default_params_lipschitz(info.dim, info.q, info.radius, gradient_bound, n, machines);
        auto data2 = inst->sampler(data_seed);
        const RunResult s = run_smd(*data2, inst->link(), sc, rng.split(1000), opts);
        g_regret.add(s.trace);
        slow_last.push_back(inst->excess_risk(s.estimate));
      }
    }
    means.push_back(mean(risks));
    std::printf("    N=%-5zu rounds=%zu  mean excess %.5f\n", n, rounds, means.back());
  }
  const double slope = oracle::loglog_slope(to_doubles(sizes), means);
  const double ratio = mean(fast_last) / mean(slow_last);
  std::printf("    slope %.3f  at N=%zu: restarted %.5f  slow %.5f  ratio %.3f\n", slope,
              sizes.back(), mean(fast_last), mean(slow_last), ratio);
  v.require(slope <= -0.8, "slope <= -0.8");
  v.require(ratio <= 0.1, "restarted risk <= 1/10 of the slow algorithm at the largest N");
  return v;
}

// ---------------------------------------------------------------------------
// Small-loss regime on a noiseless instance.

Verdict small_loss() {
  Verdict v;
  L1LqOptions o;
  o.dim = 1000;
  o.q = 2.0;
  o.noise = 0.0;
  o.sparsity = 4;
  o.law = FeatureLaw::signal_block;
  const auto inst = gen_l1lq(o, 11);
  const InstanceInfo& info = inst->info();
  const std::vector<std::size_t> sizes{1024, 2048, 4096, 8192, 16384};
  constexpr std::size_t kTrials = 50;
  RunOptions opts;
  opts.comparator = &inst->optimum();
  std::vector<double> means;
  for (std::size_t n : sizes) {
    const ProtocolConfig cfg = default_params_smooth(info.dim, info.q, info.radius,
                                                     info.smoothness, 0.0, n, 4);
    std::vector<double> risks;
    for (std::size_t t = 0; t < kTrials; ++t) {
      auto data = inst->sampler(CounterRng(61, n).split(t)());
      const RunResult r = run_smd(*data, inst->link(), cfg, CounterRng(62, n).split(t), opts);
      g_regret.add(r.trace);
      risks.push_back(inst->excess_risk(r.estimate));
    }
    const double target = cfg.cq() * info.smoothness * info.radius * info.radius /
                          static_cast<double>(n);
    means.push_back(mean(risks));
    std::printf("    N=%-5zu eta=%.4f s0=%llu  mean excess %.3g  C beta B^2/N %.3g  ratio %.3f\n", n,
                cfg.step, static_cast<unsigned long long>(cfg.output_samples), means.back(),
                target, means.back() / target);
  }
  const double slope = oracle::loglog_slope(to_doubles(sizes), means);
  std::printf("    slope %.3f\n", slope);
  v.require(slope <= -0.8, "slope <= -0.8");
  return v;
}

Verdict regret_invariant() {
  Verdict v;
  std::printf("    %zu runs, %zu per-machine records, worst slack %.3g, %zu below -1e-8\n",
              g_regret.runs, g_regret.records, g_regret.worst_slack, g_regret.violations);
  v.require(g_regret.records > 0, "criteria 4-6 must run first");
  v.require(g_regret.violations == 0, "regret inequality on every machine");
  return v;
}

// ---------------------------------------------------------------------------

Verdict jl_ogd() {
  Verdict v;
  L2L2Options o;
  o.dim = 10000;
  o.noise = 0.5;
  o.sparsity = 4;
  o.law = FeatureLaw::signal_block;
  const auto inst = gen_l2l2(o, 13);
  const InstanceInfo& info = inst->info();
  constexpr std::size_t kTrials = 20;
  const std::vector<std::pair<std::size_t, std::size_t>> shapes{{256, 2}, {512, 2}, {256, 4}};
  for (auto [n, m] : shapes) {
    const JlConfig cfg = default_jl_config(info.dim, n, m, info.radius, info.gradient_bound);
    const double k = std::min(std::ceil(static_cast<double>(n) *
                                        std::log(static_cast<double>(info.dim * n))),
                              static_cast<double>(info.dim));
    v.require(static_cast<double>(cfg.sketch_dim) == k, "sketch dimension ceil(N ln(dN)) capped at d");
    std::vector<double> jl, central;
    std::uint64_t worst_bits = 0;
    for (std::size_t t = 0; t < kTrials; ++t) {
      const std::uint64_t data_seed = CounterRng(71, n * 16 + m).split(t)();
      auto data = inst->sampler(data_seed);
      const RunResult r = run_jl_ogd(*data, inst->link(), cfg, CounterRng(72, n * 16 + m).split(t));
      jl.push_back(inst->excess_risk(r.estimate));
      worst_bits = std::max(worst_bits, r.ledger.total_bits());
      auto data2 = inst->sampler(data_seed);
      const RunResult c = run_centralized_ogd(*data2, inst->link(), info.dim, n, cfg.step);
      central.push_back(inst->excess_risk(c.estimate));
    }
    const double naive = 64.0 * static_cast<double>(info.dim * m);
    std::printf("    N=%-4zu m=%zu k=%zu  jl %.5f  ogd %.5f  ratio %.3f  bits %llu (%.2f of 64 d m)\n",
                n, m, cfg.sketch_dim, mean(jl), mean(central), mean(jl) / mean(central),
                static_cast<unsigned long long>(worst_bits), static_cast<double>(worst_bits) / naive);
    v.require(mean(jl) <= 2.0 * mean(central), "within 2x of centralized OGD");
    v.require(static_cast<double>(worst_bits) < naive, "ledger total < 64 d m");
  }
  return v;
}

// ---------------------------------------------------------------------------

Verdict schatten() {
  Verdict v;
  MatrixOptions o;
  o.dim = 64;
  o.q = 2.0;
  o.rank = 2;
  o.noise = 0.5;
  const auto inst = gen_matrix_s1sq(o, 17);
  const std::size_t n = 1024;
  constexpr std::size_t kTrials = 20;
  const SchattenConfig cfg = default_schatten_params(inst->info(), n, 2, 1.0, 4.0);
  SchattenConfig central = cfg;
  central.machines = 1;
  central.transfer_samples = 0;
  central.output_samples = 0;
  std::vector<double> smd, md;
  for (std::size_t t = 0; t < kTrials; ++t) {
    const std::uint64_t data_seed = CounterRng(81).split(t)();
    const CounterRng rng = CounterRng(82).split(t);
    auto data = inst->sampler(data_seed);
    smd.push_back(inst->excess_risk(run_schatten_smd(*data, inst->link(), cfg, rng).estimate));
    auto data2 = inst->sampler(data_seed);
    md.push_back(inst->excess_risk(run_schatten_smd(*data2, inst->link(), central, rng).estimate));
  }
  std::printf("    d=64 m=2 N=%zu s=%llu s0=%llu  smd %.5f  centralized %.5f  ratio %.3f\n", n,
              static_cast<unsigned long long>(cfg.transfer_samples),
              static_cast<unsigned long long>(cfg.output_samples), mean(smd), mean(md),
              mean(smd) / mean(md));
  v.require(mean(smd) <= 2.0 * mean(md), "within 2x of centralized matrix mirror descent");

  // ||W - Q(W)||_{S_p} against ||sigma - sigma_hat||_p.
  CounterRng rng(83);
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::size_t d : {3UL, 8UL, 64UL}) {
    for (int c = 0; c < 20; ++c, ++cases) {
      DenseMatrix w(d, random_vector(d * d, rng));
      const SvdResult basis = svd(w);
      const std::uint64_t s = 1 + rng.uniform_index(40);
      const SpectralMessage msg = spectral_maurey(w, s, rng);
      const DenseMatrix diff = w - decode(msg, d);
      std::vector<double> hat(d, 0.0);
      for (const SpectralAtom& a : msg.atoms) {
        for (std::size_t i = 0; i < d; ++i) {
          double dot = 0.0;
          for (std::size_t r = 0; r < d; ++r) dot += a.u[r] * basis.u(r, i);
          if (std::fabs(dot) > 1.0 - 1e-9) {
            hat[i] += (dot > 0 ? 1.0 : -1.0) * msg.scale * static_cast<double>(a.count) /
                      static_cast<double>(msg.samples);
            break;
          }
        }
      }
      std::vector<double> gap(d);
      for (std::size_t i = 0; i < d; ++i) gap[i] = basis.sigma[i] - hat[i];
      for (double p : {1.25, 1.5, 2.0}) {
        double lhs;
        if (d == 3) {
          lhs = oracle::lp_norm(oracle::singular_values({diff.flat().begin(), diff.flat().end()}, d), p);
        } else {
          lhs = schatten_norm(diff, p);
        }
        worst = std::max(worst, std::fabs(lhs - oracle::lp_norm(gap, p)));
      }
    }
  }
  std::printf("    spectral identity over %zu matrices: worst gap %.3g\n", cases, worst);
  v.require(worst <= 1e-8, "spectral identity within 1e-8");
  return v;
}

// ---------------------------------------------------------------------------

Verdict bit_exactness() {
  Verdict v;
  require_suite("bits", v);

  CounterRng rng(91);
  std::size_t bad = 0;
  for (int c = 0; c < 10000; ++c) {
    const std::size_t d = 1 + rng.uniform_index(c % 10 == 0 ? 10000 : 64);
    DenseVector w(d);
    const std::size_t nnz = 1 + rng.uniform_index(std::min<std::size_t>(d, 16));
    for (std::size_t j = 0; j < nnz; ++j) w[rng.uniform_index(d)] = rng.normal();
    const std::uint64_t s = 1 + rng.uniform_index(512);
    const MaureyMessage msg = maurey(w, s, rng);
    const WireMode mode = c % 2 == 0 ? WireMode::rank : WireMode::list;
    const EncodedMessage enc = encode(msg, d, mode);
    const std::uint64_t payload = mode == WireMode::rank
                                      ? oracle::ceil_log2(oracle::binomial(2 * d + s - 1, s))
                                      : s * oracle::ceil_log2(oracle::big_int(2 * d));
    if (!(decode_bits(enc.bits, d) == msg) || enc.bits.size() != enc.cost.total() ||
        enc.cost.payload_bits != (msg.is_zero() ? enc.cost.payload_bits : payload)) {
      ++bad;
    }
  }
  std::printf("    10000 random messages: %zu roundtrip or length mismatches\n", bad);
  v.require(bad == 0, "encode/decode roundtrip");

  std::size_t checked = 0, wrong = 0;
  for (std::size_t d : {1UL, 2UL, 3UL, 10UL, 100UL, 1000UL, 4096UL, 10000UL}) {
    for (std::uint64_t s : {1UL, 2UL, 3UL, 7UL, 16UL, 64UL, 100UL, 255UL, 256UL, 511UL, 512UL}) {
      ++checked;
      if (rank_payload_bits(d, s) != oracle::ceil_log2(oracle::binomial(2 * d + s - 1, s))) ++wrong;
    }
  }
  std::printf("    rank payload vs big-integer binomial: %zu of %zu differ\n", wrong, checked);
  v.require(wrong == 0, "rank payload = ceil(log2 C(2d+s-1, s))");
  return v;
}

// ---------------------------------------------------------------------------

Verdict hide_and_seek() {
  Verdict v;
  HideSeekConfig cfg;
  cfg.dim = 32;
  cfg.examples = 10000;
  cfg.machines = 10;
  cfg.biases = {0.0, 0.1, 0.4};
  cfg.budgets = {105, 110, 120, 140, 200, 0};
  cfg.trials = 200;
  cfg.seed = 3;
  const auto rows = hide_and_seek_scenario(cfg, RunSettings{});
  const double chance = 1.0 / static_cast<double>(cfg.dim);
  const double tol0 = 3.0 * std::sqrt(chance * (1.0 - chance) / static_cast<double>(cfg.trials));
  std::map<double, std::vector<const HideSeekRow*>> by_bias;
  for (const HideSeekRow& r : rows) by_bias[r.bias].push_back(&r);
  for (auto& [bias, list] : by_bias) {
    std::printf("    bias %.2f:", bias);
    for (const HideSeekRow* r : list) {
      std::printf("  s=%llu %.3f", static_cast<unsigned long long>(r->transfer_samples), r->rate());
    }
    std::printf("\n");
    for (std::size_t j = 0; j < list.size(); ++j) {
      const HideSeekRow& r = *list[j];
      if (bias == 0.0) {
        v.require(std::fabs(r.rate() - chance) <= tol0, "rate near 1/d without signal");
      } else if (j > 0) {
        const double a = list[j - 1]->rate();
        const double b = r.rate();
        const double se = std::sqrt((a * (1 - a) + b * (1 - b)) / static_cast<double>(cfg.trials));
        v.require(b >= a - 2.0 * se, "detection monotone in budget");
      }
    }
    if (bias > 0.0) v.require(list.back()->rate() >= 0.95, "rate >= 0.95 at unlimited budget");
  }
  return v;
}

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  // Criterion 3 summarizes the runs of 4-6, so it is evaluated after them.
  const std::vector<Criterion> criteria{
      {1, "geometry suite", 10, geometry},
      {2, "sparsification suite", 60, maurey_suite},
      {4, "slow-rate scaling", 600, slow_rate},
      {5, "fast-rate scaling", 900, fast_rate},
      {6, "small-loss regime", 600, small_loss},
      {3, "regret invariant", 1e9, regret_invariant},
      {7, "random-projection OGD", 300, jl_ogd},
      {8, "matrix variant", 300, schatten},
      {9, "bit exactness", 1e9, bit_exactness},
      {10, "hide-and-seek demonstration", 1e9, hide_and_seek},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  if (wanted.count(3) != 0) wanted.insert({4, 5, 6});

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && wanted.count(c.id) == 0) continue;
    std::printf("[%d] %s\n", c.id, c.title);
    std::fflush(stdout);
    const auto start = std::chrono::steady_clock::now();
    Verdict verdict;
    try {
      verdict = c.run();
    } catch (const std::exception& e) {
      std::printf("    error: %s\n", e.what());
      verdict.pass = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_seconds) {
      std::printf("    violated: runtime limit %.0f s\n", c.limit_seconds);
      verdict.pass = false;
    }
    std::printf("%s criterion %d: %s (%.1f s)\n", verdict.pass ? "PASS" : "FAIL", c.id, c.title, secs);
    std::fflush(stdout);
    if (!verdict.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
