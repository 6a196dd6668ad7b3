#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>

#include <boost/multiprecision/cpp_int.hpp>

#include "slcomm/errors.hpp"
#include "slcomm/harness.hpp"
#include "slcomm/ledger.hpp"
#include "slcomm/losses.hpp"
#include "slcomm/mirror.hpp"
#include "slcomm/protocols.hpp"
#include "slcomm/schatten.hpp"
#include "slcomm/sparsify.hpp"

namespace slcomm {

namespace {

/// Accumulates lhs / rhs ratios; a case with ratio above 1 is a violation.
class Check {
 public:
  Check(std::string module, std::string name) {
    result_.module = std::move(module);
    result_.name = std::move(name);
  }

  void ratio(double lhs, double rhs) {
    ++result_.cases;
    double r;
    if (rhs > 0.0) {
      r = lhs / rhs;
    } else {
      r = lhs <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
    result_.worst_ratio = std::max(result_.worst_ratio, r);
  }

  void flag(bool ok) { ratio(ok ? 0.0 : 2.0, 1.0); }

  CheckResult done() {
    result_.passed = result_.cases > 0 && result_.worst_ratio <= 1.0;
    return result_;
  }

 private:
  CheckResult result_;
};

/// Random vector with occasional zeros, sign changes and varying scale.
DenseVector random_vector(std::size_t d, CounterRng& rng) {
  DenseVector v(d);
  const double scale = std::exp(4.0 * rng.uniform01() - 2.0);
  for (std::size_t i = 0; i < d; ++i) {
    v[i] = rng.uniform01() < 0.15 ? 0.0 : scale * rng.normal();
  }
  return v;
}

DenseVector into_l1_ball(DenseVector v, double radius, CounterRng& rng) {
  const double n1 = lp_norm(v, 1.0);
  if (n1 > 0.0) v *= radius * rng.uniform01() / n1;
  return v;
}

DenseMatrix random_matrix(std::size_t d, CounterRng& rng) {
  DenseMatrix m(d);
  for (double& x : m.flat()) x = rng.normal();
  return m;
}

double random_p(CounterRng& rng) { return 1.05 + 0.95 * rng.uniform01(); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> suite_vecspace(std::uint64_t seed) {
  CounterRng rng(seed, 0x5ec1);
  std::vector<CheckResult> out;

  Check mono("vecspace", "norm monotonicity lp' <= lp");
  for (int c = 0; c < 1000; ++c) {
    const DenseVector v = random_vector(1 + rng.uniform_index(40), rng);
    const double p = 1.0 + 3.0 * rng.uniform01();
    const double p2 = p + 3.0 * rng.uniform01();
    const double a = lp_norm(v, p);
    mono.ratio(lp_norm(v, p2), a * (1.0 + 1e-14) + 1e-300);
    mono.ratio(lp_norm(v, LpOrder::infinity()), a * (1.0 + 1e-14) + 1e-300);
  }
  out.push_back(mono.done());

  Check unitary("vecspace", "schatten unitary invariance");
  for (int c = 0; c < 50; ++c) {
    const std::size_t d = 2 + rng.uniform_index(12);
    const DenseMatrix m = random_matrix(d, rng);
    const DenseMatrix q1 = svd(random_matrix(d, rng)).u;
    const DenseMatrix q2 = svd(random_matrix(d, rng)).v;
    const double p = 1.0 + 3.0 * rng.uniform01();
    const double a = schatten_norm(m, p);
    const double b = schatten_norm(q1 * m * q2, p);
    unitary.ratio(std::abs(a - b), 1e-8 * std::max(1.0, a));
  }
  out.push_back(unitary.done());

  Check post("vecspace", "svd reconstruction and orthogonality");
  for (int c = 0; c < 100; ++c) {
    const std::size_t d = 2 + rng.uniform_index(31);
    DenseMatrix m = random_matrix(d, rng);
    if (c % 10 == 0) {
      // rank-deficient case
      for (std::size_t j = 0; j < d; ++j) m(d - 1, j) = m(0, j);
    }
    const SvdResult r = svd(m);
    const double scale = std::max(1.0, m.frobenius_norm());
    post.ratio(max_abs_diff(r.reconstruct().flat(), m.flat()), 1e-10 * scale);
    const DenseMatrix id = DenseMatrix::identity(d);
    post.ratio(max_abs_diff((r.u.transposed() * r.u).flat(), id.flat()), 1e-10);
    post.ratio(max_abs_diff((r.v.transposed() * r.v).flat(), id.flat()), 1e-10);
    bool sorted = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (r.sigma[i] < 0.0 || (i > 0 && r.sigma[i] > r.sigma[i - 1])) sorted = false;
    }
    post.flag(sorted);
  }
  out.push_back(post.done());
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> suite_mirror(std::uint64_t seed) {
  CounterRng rng(seed, 0x3177);
  std::vector<CheckResult> out;
  constexpr int kCases = 1000;

  Check duality("mirror", "duality ||grad R(w)||_q = ||w - c||_p");
  Check roundtrip("mirror", "inverse link roundtrip");
  Check strong("mirror", "strong convexity (p-1)/2");
  for (int c = 0; c < kCases; ++c) {
    const std::size_t d = 1 + rng.uniform_index(30);
    const double p = random_p(rng);
    DenseVector center = c % 2 == 0 ? DenseVector(d) : random_vector(d, rng);
    const MirrorMap map(p, center);
    const DenseVector w = random_vector(d, rng);
    const DenseVector g = grad_reg(map, w);
    const double lhs = lp_norm(g, map.q());
    const double rhs = lp_norm(w - center, p);
    duality.ratio(std::abs(lhs - rhs), 1e-10 * (1.0 + lp_norm(w, p)));
    const DenseVector back = inv_grad_reg(map, g);
    roundtrip.ratio(max_abs_diff(back.span(), w.span()),
                    1e-8 * (1.0 + lp_norm(w, LpOrder::infinity())));
    const DenseVector b = random_vector(d, rng);
    const double dist = lp_norm(w - b, p);
    strong.ratio(0.5 * (p - 1.0) * dist * dist - 1e-12, bregman(map, w, b));
  }
  out.push_back(duality.done());
  out.push_back(roundtrip.done());
  out.push_back(strong.done());

  Check upper("mirror", "bregman upper bound 3B||a-b||_p");
  Check grad_holder("mirror", "gradient Holder continuity");
  Check smooth("mirror", "divergence difference bound (5B, 4B^{3-p})");
  Check centered("mirror", "centered divergence difference bound (10B, 16B^{3-p})");
  for (int c = 0; c < kCases; ++c) {
    const std::size_t d = 1 + rng.uniform_index(30);
    const double p = random_p(rng);
    const double radius = std::exp(2.0 * rng.uniform01() - 1.0);
    const MirrorMap map = MirrorMap::at_origin(p, d);
    const DenseVector a = into_l1_ball(random_vector(d, rng), radius, rng);
    DenseVector b = into_l1_ball(random_vector(d, rng), radius, rng);
    if (c % 4 == 0) {
      // nearby pair
      b = a;
      b[rng.uniform_index(d)] += 1e-3 * radius * (rng.uniform01() - 0.5);
      if (lp_norm(b, 1.0) > radius) b = a;
    }
    const DenseVector cpt = into_l1_ball(random_vector(d, rng), radius, rng);
    const double dp = lp_norm(a - b, p);
    const double dinf = lp_norm(a - b, LpOrder::infinity());

    const double bmax = std::max(lp_norm(a, p), lp_norm(b, p));
    upper.ratio(bregman(map, a, b), 3.0 * bmax * dp + 1e-12);

    const double gdiff = lp_norm(grad_reg(map, a) - grad_reg(map, b), LpOrder::infinity());
    grad_holder.ratio(gdiff, 2.0 * std::pow(bmax, 2.0 - p) * std::pow(dinf, p - 1.0) + dp + 1e-12);

    const double diff = bregman(map, cpt, a) - bregman(map, cpt, b);
    smooth.ratio(diff, 5.0 * radius * dp + 4.0 * std::pow(radius, 3.0 - p) * std::pow(dinf, p - 1.0) +
                           1e-12);

    const DenseVector wbar = into_l1_ball(random_vector(d, rng), radius, rng);
    const MirrorMap shifted(p, wbar);
    const double cdiff = bregman(shifted, cpt, a) - bregman(shifted, cpt, b);
    centered.ratio(cdiff, 10.0 * radius * dp +
                              16.0 * std::pow(radius, 3.0 - p) * std::pow(dinf, p - 1.0) + 1e-12);
  }
  out.push_back(upper.done());
  out.push_back(grad_holder.done());
  out.push_back(smooth.done());
  out.push_back(centered.done());

  Check scalar("mirror", "scalar Holder |h(x)-h(y)| <= 2|x-y|^{p-1}");
  for (int c = 0; c < kCases; ++c) {
    const double p = random_p(rng);
    const double x = -1.0 + 2.0 * static_cast<double>(c) / (kCases - 1);
    const double y = x + (rng.uniform01() - 0.5) * (c % 3 == 0 ? 2.0 : 1e-3);
    const double hx = std::copysign(std::pow(std::abs(x), p - 1.0), x) * (x == 0.0 ? 0.0 : 1.0);
    const double hy = std::copysign(std::pow(std::abs(y), p - 1.0), y) * (y == 0.0 ? 0.0 : 1.0);
    scalar.ratio(std::abs(hx - hy), 2.0 * std::pow(std::abs(x - y), p - 1.0) + 1e-15);
  }
  out.push_back(scalar.done());

  // Projection optimality through the generalized Pythagorean inequality
  // D(u||pi) + D(pi||y) <= D(u||y) for every feasible u.
  Check pyth("mirror", "projection Pythagorean inequality");
  Check feasible("mirror", "projection feasibility");
  for (int c = 0; c < 300; ++c) {
    const std::size_t d = 1 + rng.uniform_index(20);
    const double p = random_p(rng);
    const double radius = 0.5 + rng.uniform01();
    const DenseVector center =
        c % 2 == 0 ? DenseVector(d) : into_l1_ball(random_vector(d, rng), radius, rng);
    const MirrorMap map(p, center);
    const L1Ball ball(radius);
    const DenseVector theta = random_vector(d, rng);
    const ProjectedPoint proj = bregman_project_with_dual(map, ball, theta);
    feasible.ratio(lp_norm(proj.primal, 1.0), radius * (1.0 + 1e-9));
    const DenseVector y = inv_grad_reg(map, theta);
    for (int k = 0; k < 5; ++k) {
      const DenseVector u = into_l1_ball(random_vector(d, rng), radius, rng);
      const double lhs = bregman(map, u, proj.primal) + bregman(map, proj.primal, y);
      const double rhs = bregman(map, u, y);
      pyth.ratio(lhs, rhs + 1e-7 * (1.0 + rhs));
    }
  }
  out.push_back(feasible.done());
  out.push_back(pyth.done());
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> suite_maurey(std::uint64_t seed) {
  CounterRng rng(seed, 0x3a0e);
  std::vector<CheckResult> out;

  {
    Check unbiased("maurey", "unbiasedness (3 standard errors)");
    const std::size_t d = 50;
    const DenseVector w = random_vector(d, rng);
    std::vector<DenseVector> dirs;
    for (int k = 0; k < 5; ++k) dirs.push_back(random_vector(d, rng));
    std::vector<double> sum(dirs.size()), sum_sq(dirs.size());
    constexpr int kTrials = 20000;
    for (int t = 0; t < kTrials; ++t) {
      const DenseVector q = decode(maurey(w, 16, rng), d);
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        const double z = dot(q.span(), dirs[k].span());
        sum[k] += z;
        sum_sq[k] += z * z;
      }
    }
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const double mean = sum[k] / kTrials;
      const double var = std::max(0.0, sum_sq[k] / kTrials - mean * mean);
      const double se = std::sqrt(var / kTrials);
      unbiased.ratio(std::abs(mean - dot(w.span(), dirs[k].span())), 3.0 * se + 1e-12);
    }
    out.push_back(unbiased.done());
  }

  {
    Check expect("maurey", "expected lp error <= 4||w||_1 s^{-(1-1/p)}");
    Check tail("maurey", "0.95-quantile lp error <= ||w||_1 (24 log 20 / s)^{1-1/p}");
    const std::size_t d = 1000;
    const DenseVector w = random_vector(d, rng);
    const double n1 = lp_norm(w, 1.0);
    constexpr int kTrials = 10000;
    for (double p : {1.25, 1.5, 2.0}) {
      for (std::uint64_t s : {16U, 64U, 256U}) {
        std::vector<double> errs(kTrials);
        double total = 0.0;
        for (int t = 0; t < kTrials; ++t) {
          errs[t] = lp_norm(decode(maurey(w, s, rng), d) - w, p);
          total += errs[t];
        }
        const double expo = 1.0 - 1.0 / p;
        expect.ratio(total / kTrials, 4.0 * n1 * std::pow(static_cast<double>(s), -expo));
        std::nth_element(errs.begin(), errs.begin() + kTrials * 95 / 100, errs.end());
        tail.ratio(errs[kTrials * 95 / 100],
                   n1 * std::pow(24.0 * std::log(20.0) / static_cast<double>(s), expo));
      }
    }
    out.push_back(expect.done());
    out.push_back(tail.done());
  }

  {
    Check risk("maurey", "square-loss risk preservation beta R^2 ||w||_1^2 / s");
    const std::size_t d = 40;
    const double bound_x = 1.0;
    std::vector<Example> data(200);
    const DenseVector wtrue = random_vector(d, rng);
    for (Example& ex : data) {
      ex.x = DenseVector(d);
      for (std::size_t i = 0; i < d; ++i) ex.x[i] = bound_x * (2.0 * rng.uniform01() - 1.0);
      ex.y = dot(ex.x.span(), wtrue.span()) * 0.1 + 0.1 * rng.normal();
    }
    const LinkFunction link = LinkFunction::square();
    auto empirical = [&](const DenseVector& v) {
      double acc = 0.0;
      for (const Example& ex : data) acc += loss(link, v.span(), ex);
      return acc / static_cast<double>(data.size());
    };
    for (std::uint64_t s : {4U, 16U, 64U}) {
      const DenseVector w = into_l1_ball(random_vector(d, rng), 1.0, rng);
      const double base = empirical(w);
      const double n1 = lp_norm(w, 1.0);
      constexpr int kTrials = 4000;
      double sum = 0.0, sum_sq = 0.0;
      for (int t = 0; t < kTrials; ++t) {
        const double v = empirical(decode(maurey(w, s, rng), d));
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / kTrials;
      const double se = std::sqrt(std::max(0.0, sum_sq / kTrials - mean * mean) / kTrials);
      risk.ratio(mean - base, 2.0 * bound_x * bound_x * n1 * n1 / static_cast<double>(s) + 3.0 * se);
    }
    out.push_back(risk.done());
  }

  {
    Check smooth("maurey", "smooth function bound F(w) + ||w||_1^2 / s");
    const std::size_t d = 30;
    for (std::uint64_t s : {2U, 8U, 32U}) {
      const DenseVector w = random_vector(d, rng);
      const DenseVector v = random_vector(d, rng);
      auto f = [&](const DenseVector& z) {
        const double n = lp_norm(z - v, 2.0);
        return 0.5 * n * n;
      };
      const double n1 = lp_norm(w, 1.0);
      constexpr int kTrials = 4000;
      double sum = 0.0, sum_sq = 0.0;
      for (int t = 0; t < kTrials; ++t) {
        const double val = f(decode(maurey(w, s, rng), d));
        sum += val;
        sum_sq += val * val;
      }
      const double mean = sum / kTrials;
      const double se = std::sqrt(std::max(0.0, sum_sq / kTrials - mean * mean) / kTrials);
      smooth.ratio(mean - f(w), n1 * n1 / static_cast<double>(s) + 3.0 * se);
    }
    out.push_back(smooth.done());
  }

  {
    Check spectral("maurey", "spectral identity ||W-Q(W)||_Sp = ||sigma - sigma_hat||_p");
    for (int c = 0; c < 40; ++c) {
      const std::size_t d = 2 + rng.uniform_index(10);
      const DenseMatrix w = random_matrix(d, rng);
      const SvdResult basis = svd(w);
      const SpectralMessage msg = spectral_maurey(basis, basis.sigma, 1 + rng.uniform_index(20), rng);
      const DenseMatrix q = decode(msg, d);
      std::vector<double> sigma_hat(d, 0.0);
      for (const SpectralAtom& atom : msg.atoms) {
        const double weight = msg.scale * static_cast<double>(atom.count) / static_cast<double>(msg.samples);
        for (std::size_t j = 0; j < d; ++j) {
          double cu = 0.0, cv = 0.0;
          for (std::size_t i = 0; i < d; ++i) {
            cu += basis.u(i, j) * atom.u[i];
            cv += basis.v(i, j) * atom.v[i];
          }
          sigma_hat[j] += weight * cu * cv;
        }
      }
      const double p = random_p(rng);
      std::vector<double> diff(d);
      for (std::size_t j = 0; j < d; ++j) diff[j] = basis.sigma[j] - sigma_hat[j];
      const double lhs = schatten_norm(w - q, p);
      const double rhs = lp_norm(diff, p);
      spectral.ratio(std::abs(lhs - rhs), 1e-8 * std::max(1.0, rhs));
    }
    out.push_back(spectral.done());
  }
  return out;
}

// ---------------------------------------------------------------------------

using boost::multiprecision::cpp_int;

cpp_int binomial_oracle(std::uint64_t n, std::uint64_t k) {
  cpp_int r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

std::uint64_t ceil_log2(const cpp_int& x) {
  if (x <= 1) return 0;
  const cpp_int y = x - 1;
  return static_cast<std::uint64_t>(boost::multiprecision::msb(y)) + 1;
}

MaureyMessage random_message(std::size_t d, CounterRng& rng) {
  MaureyMessage msg;
  const std::uint64_t s = 1 + rng.uniform_index(rng.uniform01() < 0.5 ? 8 : 300);
  if (rng.uniform01() < 0.05) {
    msg.samples = s;
    return msg;
  }
  std::map<std::pair<std::uint32_t, int>, std::uint64_t> counts;
  for (std::uint64_t k = 0; k < s; ++k) {
    const auto idx = static_cast<std::uint32_t>(rng.uniform_index(d));
    const int sign = rng.rademacher() > 0 ? 1 : -1;
    ++counts[{idx, sign}];
  }
  msg.scale = std::exp(10.0 * rng.uniform01() - 5.0);
  msg.samples = s;
  for (const auto& [key, count] : counts) {
    msg.atoms.push_back({key.first, static_cast<std::int8_t>(key.second), count});
  }
  return msg;
}

std::vector<CheckResult> suite_bits(std::uint64_t seed) {
  CounterRng rng(seed, 0xb175);
  std::vector<CheckResult> out;

  Check round("bits", "encode/decode roundtrip");
  for (int c = 0; c < 10000; ++c) {
    const std::size_t d = 1 + rng.uniform_index(c % 2 == 0 ? 16 : 10000);
    const MaureyMessage msg = random_message(d, rng);
    const WireMode mode = c % 3 == 0 ? WireMode::list : WireMode::rank;
    const EncodedMessage enc = encode(msg, d, mode);
    const bool size_ok = enc.bits.size() == enc.cost.total() && enc.cost == message_cost(msg, d, mode);
    round.flag(size_ok && decode_bits(enc.bits, d) == msg);
  }
  out.push_back(round.done());

  Check rank("bits", "rank payload = ceil(log2 C(2d+s-1, s))");
  for (std::size_t d : {1UL, 2UL, 3UL, 7UL, 32UL, 100UL, 1000UL, 4096UL, 10000UL}) {
    for (std::uint64_t s : {1UL, 2UL, 5UL, 16UL, 63UL, 128UL, 300UL, 512UL}) {
      const std::uint64_t expected = ceil_log2(binomial_oracle(2 * d + s - 1, s));
      const std::uint64_t got = rank_payload_bits(d, s);
      rank.flag(expected == got);
    }
  }
  out.push_back(rank.done());

  Check list("bits", "list payload = s ceil(log2 2d)");
  for (std::size_t d : {1UL, 2UL, 5UL, 64UL, 1000UL, 65536UL}) {
    for (std::uint64_t s : {1UL, 3UL, 100UL}) {
      list.flag(list_payload_bits(d, s) == s * ceil_log2(cpp_int(2 * d)));
    }
  }
  out.push_back(list.done());

  Check malformed("bits", "truncated streams are rejected");
  for (int c = 0; c < 200; ++c) {
    const std::size_t d = 1 + rng.uniform_index(64);
    MaureyMessage msg = random_message(d, rng);
    const EncodedMessage enc = encode(msg, d, c % 2 == 0 ? WireMode::list : WireMode::rank);
    if (enc.bits.size() <= 1) continue;
    Bitstring cut;
    const std::size_t keep = rng.uniform_index(enc.bits.size());
    for (std::size_t i = 0; i < keep; ++i) cut.push_bit(enc.bits.bit(i));
    bool rejected = false;
    try {
      (void)decode_bits(cut, d);
    } catch (const MalformedMessage&) {
      rejected = true;
    }
    malformed.flag(rejected);
  }
  out.push_back(malformed.done());
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> suite_losses(std::uint64_t seed) {
  CounterRng rng(seed, 0x1055);
  std::vector<CheckResult> out;
  const std::vector<LinkFunction> links{LinkFunction::linear(), LinkFunction::square(),
                                        LinkFunction::absolute(), LinkFunction::hinge(),
                                        LinkFunction::logistic()};

  Check convex("losses", "convexity along segments");
  for (const LinkFunction& link : links) {
    for (int c = 0; c < 1000; ++c) {
      const std::size_t d = 1 + rng.uniform_index(10);
      Example ex{random_vector(d, rng), 2.0 * rng.uniform01() - 1.0};
      if (link.kind() == LinkKind::hinge || link.kind() == LinkKind::logistic) {
        ex.y = rng.rademacher();
      }
      const DenseVector w1 = random_vector(d, rng);
      const DenseVector w2 = random_vector(d, rng);
      const double t = rng.uniform01();
      const DenseVector mid = t * w1 + (1.0 - t) * w2;
      const double lhs = loss(link, mid.span(), ex);
      const double rhs = t * loss(link, w1.span(), ex) + (1.0 - t) * loss(link, w2.span(), ex);
      convex.ratio(lhs, rhs + 1e-12 + 1e-12 * std::abs(rhs));
    }
  }
  out.push_back(convex.done());

  Check lip("losses", "Lipschitz constant 1 on |y| <= 1");
  for (const LinkFunction& link : {links[0], links[2], links[3], links[4]}) {
    for (int c = 0; c < 1000; ++c) {
      const double a = 6.0 * rng.uniform01() - 3.0;
      const double b = a + (rng.uniform01() - 0.5) * (c % 2 == 0 ? 4.0 : 1e-3);
      const double y = link.kind() == LinkKind::linear || link.kind() == LinkKind::absolute
                           ? 2.0 * rng.uniform01() - 1.0
                           : rng.rademacher();
      lip.ratio(std::abs(link.value(a, y) - link.value(b, y)), std::abs(a - b) * (1.0 + 1e-12) + 1e-15);
    }
  }
  out.push_back(lip.done());

  for (const LinkFunction& link : {links[1], links[4]}) {
    CounterRng sub = rng.split(static_cast<std::uint64_t>(link.kind()));
    const SelfBoundReport rep = smoothness_selfbound_check(link, sub, 10000);
    CheckResult r;
    r.module = "losses";
    r.name = "self-bounding |phi'|^2 <= 4 beta phi (" + link.name() + ")";
    r.cases = rep.cases;
    r.worst_ratio = rep.worst_ratio;
    r.passed = rep.passed;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> suite_datagen(std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::vector<std::pair<std::string, std::unique_ptr<ProblemInstance>>> instances;
  {
    L1LqOptions o;
    o.dim = 200;
    o.q = 3.0;
    instances.emplace_back("l1lq sphere", gen_l1lq(o, seed));
    o.law = FeatureLaw::signal_block;
    o.q = 2.0;
    instances.emplace_back("l1lq signal block", gen_l1lq(o, seed + 1));
    SparseRegressionOptions s;
    s.dim = 256;
    instances.emplace_back("sparse regression", gen_sparse_regression(s, seed));
    HideAndSeekOptions h;
    instances.emplace_back("hide and seek", gen_hide_and_seek(h));
    L2L2Options l;
    l.dim = 200;
    instances.emplace_back("l2l2", gen_l2l2(l, seed));
  }

  Check bounds("datagen", "declared feature norm bound");
  Check repro("datagen", "stream reproducibility");
  Check closed("datagen", "closed-form risk vs Monte-Carlo (3 standard errors)");
  Check optimal("datagen", "optimum has minimal risk on probe points");
  CounterRng rng(seed, 0xda7e);
  for (const auto& [name, inst] : instances) {
    const InstanceInfo& info = inst->info();
    const bool linf = info.name == "sparse_regression" || info.name == "hide_and_seek";
    auto a = inst->sampler(seed);
    auto b = inst->sampler(seed);
    Example ea, eb;
    bool same = true;
    for (int k = 0; k < 10000; ++k) {
      a->next(ea);
      b->next(eb);
      same = same && ea.x == eb.x && ea.y == eb.y;
      const double n = linf ? lp_norm(ea.x, LpOrder::infinity()) : lp_norm(ea.x, info.q);
      bounds.ratio(n, info.feature_norm * (1.0 + 1e-12));
    }
    repro.flag(same);

    for (int k = 0; k < 3; ++k) {
      const DenseVector probe = into_l1_ball(random_vector(info.dim, rng), info.radius, rng);
      const auto cf = inst->closed_form_risk(probe);
      const double r = inst->risk(probe);
      optimal.ratio(inst->risk(inst->optimum()) - 1e-12, r);
      if (cf) {
        const HoldoutEstimate h = holdout_risk(*inst, probe, 100000, seed + 17 + k);
        closed.ratio(std::abs(*cf - h.mean), 3.0 * h.standard_error + 1e-12);
      }
    }
  }
  out.push_back(bounds.done());
  out.push_back(repro.done());
  out.push_back(closed.done());
  out.push_back(optimal.done());
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> suite_protocols(std::uint64_t seed) {
  std::vector<CheckResult> out;
  Check regret("protocols", "per-machine regret inequality");
  Check feasible("protocols", "iterate feasibility");
  Check ledger("protocols", "ledger completeness and reproducibility");

  for (double q : {2.0, 3.0}) {
    L1LqOptions o;
    o.dim = 500;
    o.q = q;
    const auto inst = gen_l1lq(o, seed);
    for (std::size_t m : {1UL, 4UL, 8UL}) {
      const ProtocolConfig cfg = default_params_lipschitz(inst->info(), 256, m);
      RunOptions opts;
      opts.comparator = &inst->optimum();
      auto run = [&] {
        auto data = inst->sampler(seed + m);
        return run_smd(*data, inst->link(), cfg, CounterRng(seed, m), opts);
      };
      const RunResult r1 = run();
      const RunResult r2 = run();
      for (const RegretRecord& rec : r1.trace.regret) {
        regret.ratio(-rec.slack(), 1e-8);
      }
      feasible.ratio(r1.trace.max_l1_ratio, 1.0 + 1e-9);
      std::uint64_t sum = 0;
      for (const LedgerEntry& e : r1.ledger.entries()) sum += e.cost.total();
      const bool same = r1.estimate == r2.estimate &&
                        r1.ledger.total_bits() == r2.ledger.total_bits() &&
                        r1.ledger.entries().size() == r2.ledger.entries().size();
      ledger.flag(sum == r1.ledger.total_bits() && same);
    }
  }
  out.push_back(regret.done());
  out.push_back(feasible.done());
  out.push_back(ledger.done());

  Check cone("protocols", "l1 cone property of the sparse-regression set");
  {
    SparseRegressionOptions o;
    o.dim = 64;
    const auto inst = gen_sparse_regression(o, seed);
    const DenseVector& ws = inst->optimum();
    const double radius = inst->info().radius;
    CounterRng rng(seed, 0xc0e);
    for (int c = 0; c < 1000; ++c) {
      const DenseVector w = into_l1_ball(random_vector(o.dim, rng), radius, rng);
      double on = 0.0, off = 0.0;
      for (std::size_t i = 0; i < o.dim; ++i) {
        const double diff = std::abs(w[i] - ws[i]);
        (ws[i] != 0.0 ? on : off) += diff;
      }
      cone.ratio(off, on + 1e-9);
    }
  }
  out.push_back(cone.done());
  return out;
}

using SuiteFn = std::vector<CheckResult> (*)(std::uint64_t);

const std::vector<std::pair<std::string, SuiteFn>>& suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> table{
      {"vecspace", suite_vecspace}, {"mirror", suite_mirror},   {"maurey", suite_maurey},
      {"bits", suite_bits},         {"losses", suite_losses},   {"datagen", suite_datagen},
      {"protocols", suite_protocols},
  };
  return table;
}

}  // namespace

std::vector<std::string> verify_modules() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : suites()) names.push_back(name);
  return names;
}

std::vector<CheckResult> verify_module(const std::string& module, std::uint64_t seed) {
  std::vector<CheckResult> results;
  for (const auto& [name, fn] : suites()) {
    if (module == "all" || module == name) {
      auto part = fn(seed);
      results.insert(results.end(), part.begin(), part.end());
    }
  }
  if (results.empty()) {
    std::string known;
    for (const auto& n : verify_modules()) known += " " + n;
    throw InvalidParameter("unknown verify suite '" + module + "' (known: all" + known + ")");
  }
  return results;
}

void print_verify_report(std::ostream& out, const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results) {
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.4g", r.worst_ratio);
    out << (r.passed ? "PASS" : "FAIL") << "  " << r.module << ": " << r.name << "  cases="
        << r.cases << "  worst_ratio=" << ratio << '\n';
  }
}

}  // namespace slcomm
