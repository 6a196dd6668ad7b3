#include "slcomm/sparsify.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <boost/random/binomial_distribution.hpp>

#include "slcomm/errors.hpp"

namespace slcomm {

namespace {

void check_samples(std::uint64_t s) {
  if (s == 0) throw InvalidParameter("sample count s must be positive");
  if (s > kMaxSamples) {
    throw Unsupported("sample count " + std::to_string(s) + " exceeds the 32-bit header field");
  }
}

std::uint64_t code_of(const MaureyAtom& a) noexcept {
  return 2 * static_cast<std::uint64_t>(a.index) + (a.sign > 0 ? 1U : 0U);
}

MaureyAtom atom_of(std::uint64_t code, std::uint64_t count) noexcept {
  return {static_cast<std::uint32_t>(code / 2), static_cast<std::int8_t>((code & 1U) != 0U ? 1 : -1),
          count};
}

unsigned bit_width_for(std::uint64_t alphabet) noexcept {
  // ceil(log2 alphabet) for alphabet >= 2, 1 bit for a singleton alphabet.
  return alphabet <= 2 ? 1U : static_cast<unsigned>(std::bit_width(alphabet - 1));
}

// C(2d + s - 1, s) is reused for every message of a run, so cache it.
const mpz_class& multiset_count(std::size_t dim, std::uint64_t s) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::uint64_t>, mpz_class> cache;
  const std::lock_guard lock(mutex);
  auto key = std::make_pair(dim, s);
  auto it = cache.find(key);
  if (it == cache.end()) {
    mpz_class c;
    const std::uint64_t n = 2 * static_cast<std::uint64_t>(dim) + s - 1;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n),
                 static_cast<unsigned long>(std::min<std::uint64_t>(s, n - s)));
    if (cache.size() > 4096) cache.clear();
    it = cache.emplace(key, std::move(c)).first;
  }
  return it->second;
}

mpz_class binomial(std::uint64_t n, std::uint64_t k) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return c;
}

std::vector<std::uint8_t> to_bytes(const mpz_class& v) {
  if (v == 0) return {};
  const std::size_t n = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  std::vector<std::uint8_t> out(n);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
  out.resize(written);
  return out;
}

mpz_class from_bytes(const std::vector<std::uint8_t>& bytes) {
  mpz_class v;
  if (!bytes.empty()) mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return v;
}

// Rank of the sorted code sequence a_1 <= ... <= a_s among all multisets of
// size s over an alphabet of size A: sum_j C(a_j + j - 1, j). Consecutive
// binomials are reached by exact multiplicative updates.
mpz_class multiset_rank(const std::vector<MaureyAtom>& atoms) {
  mpz_class rank = 0;
  mpz_class b;
  bool started = false;
  std::uint64_t j = 0;
  std::uint64_t c_prev = 0;
  for (const MaureyAtom& atom : atoms) {
    const std::uint64_t a = code_of(atom);
    for (std::uint64_t k = 0; k < atom.count; ++k) {
      ++j;
      const std::uint64_t c = a + j - 1;
      if (a == 0) continue;
      if (!started) {
        b = binomial(c, j);
        started = true;
      } else {
        // (c_prev, j - 1) -> (c_prev + 1, j)
        b *= static_cast<unsigned long>(c_prev + 1);
        mpz_divexact_ui(b.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(j));
        // (x, j) -> (x + 1, j) until x = c
        for (std::uint64_t x = c_prev + 1; x < c; ++x) {
          b *= static_cast<unsigned long>(x + 1);
          mpz_divexact_ui(b.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(x + 1 - j));
        }
      }
      rank += b;
      c_prev = c;
    }
  }
  return rank;
}

std::vector<MaureyAtom> multiset_unrank(mpz_class rank, std::uint64_t alphabet, std::uint64_t s) {
  std::vector<std::uint64_t> codes(s, 0);
  std::uint64_t j = s;
  std::uint64_t c = alphabet + s - 2;
  mpz_class b = binomial(c, j);
  while (true) {
    while (b > rank) {
      // C(c - 1, j) = C(c, j) (c - j) / c
      b *= static_cast<unsigned long>(c - j);
      mpz_divexact_ui(b.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(c));
      --c;
    }
    codes[j - 1] = c - (j - 1);
    rank -= b;
    if (j == 1) break;
    if (b == 0) break;  // every remaining code is zero
    b *= static_cast<unsigned long>(j);
    mpz_divexact_ui(b.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(c));
    --c;
    --j;
  }
  if (rank != 0) throw MalformedMessage("multiset rank did not decode cleanly");

  std::vector<MaureyAtom> atoms;
  for (std::uint64_t code : codes) {
    if (!atoms.empty() && code_of(atoms.back()) == code) {
      ++atoms.back().count;
    } else {
      atoms.push_back(atom_of(code, 1));
    }
  }
  return atoms;
}

void push_double(Bitstring& bits, double x) {
  std::uint64_t raw = 0;
  std::memcpy(&raw, &x, sizeof raw);
  bits.push_bits(raw, 64);
}

double read_double(BitReader& reader) {
  const std::uint64_t raw = reader.read_bits(64);
  double x = 0.0;
  std::memcpy(&x, &raw, sizeof x);
  return x;
}

constexpr std::uint64_t kInverseCdfFactor = 4;

}  // namespace

std::vector<std::pair<std::uint32_t, std::uint64_t>> sample_counts(std::span<const double> weights,
                                                                   std::uint64_t s,
                                                                   CounterRng& rng) {
  std::vector<std::uint32_t> support;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) support.push_back(static_cast<std::uint32_t>(i));
  }
  std::vector<std::pair<std::uint32_t, std::uint64_t>> out;
  if (support.empty()) return out;

  if (s <= kInverseCdfFactor * support.size()) {
    std::vector<double> cumulative(support.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      acc += weights[support[k]];
      cumulative[k] = acc;
    }
    std::vector<std::uint32_t> draws(s);
    for (auto& d : draws) {
      const double u = rng.uniform01() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      if (it == cumulative.end()) --it;
      d = support[static_cast<std::size_t>(it - cumulative.begin())];
    }
    std::sort(draws.begin(), draws.end());
    for (std::uint32_t idx : draws) {
      if (!out.empty() && out.back().first == idx) {
        ++out.back().second;
      } else {
        out.emplace_back(idx, 1);
      }
    }
    return out;
  }

  // Multinomial counts through conditional binomials; suffix sums keep the
  // conditional probabilities accurate to the last coordinate.
  std::vector<double> suffix(support.size() + 1, 0.0);
  for (std::size_t k = support.size(); k-- > 0;) suffix[k] = suffix[k + 1] + weights[support[k]];
  std::uint64_t remaining = s;
  for (std::size_t k = 0; k < support.size() && remaining > 0; ++k) {
    std::uint64_t c = remaining;
    if (k + 1 < support.size()) {
      const double prob = std::clamp(weights[support[k]] / suffix[k], 0.0, 1.0);
      boost::random::binomial_distribution<std::int64_t, double> dist(
          static_cast<std::int64_t>(remaining), prob);
      c = std::min(static_cast<std::uint64_t>(std::max<std::int64_t>(0, dist(rng))), remaining);
    }
    if (c > 0) out.emplace_back(support[k], c);
    remaining -= c;
  }
  return out;
}

MaureyMessage maurey(const DenseVector& w, std::uint64_t s, CounterRng& rng) {
  check_samples(s);
  if (w.empty()) throw InvalidParameter("maurey: empty vector");
  if (w.size() > (std::size_t{1} << 31)) throw Unsupported("maurey: dimension exceeds 2^31");
  if (!w.all_finite()) throw InvalidParameter("maurey: vector has non-finite entries");

  MaureyMessage msg;
  msg.samples = s;
  std::vector<double> weights(w.size());
  double l1 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    weights[i] = std::fabs(w[i]);
    l1 += weights[i];
  }
  if (l1 == 0.0) return msg;
  msg.scale = l1;
  for (const auto& [idx, count] : sample_counts(weights, s, rng)) {
    msg.atoms.push_back({idx, static_cast<std::int8_t>(w[idx] > 0.0 ? 1 : -1), count});
  }
  return msg;
}

void validate(const MaureyMessage& msg, std::size_t dim) {
  if (msg.samples == 0) throw MalformedMessage("message has zero samples");
  if (msg.samples > kMaxSamples) throw MalformedMessage("sample count exceeds header field");
  if (!std::isfinite(msg.scale) || msg.scale < 0.0) {
    throw MalformedMessage("message scale must be finite and nonnegative");
  }
  if (msg.scale == 0.0) {
    if (!msg.atoms.empty()) throw MalformedMessage("zero-scale message carries atoms");
    return;
  }
  std::uint64_t total = 0;
  std::uint64_t prev = 0;
  bool first = true;
  for (const MaureyAtom& a : msg.atoms) {
    if (a.index >= dim) {
      throw MalformedMessage("atom index " + std::to_string(a.index) + " out of range for d=" +
                             std::to_string(dim));
    }
    if (a.sign != 1 && a.sign != -1) throw MalformedMessage("atom sign must be +1 or -1");
    if (a.count == 0) throw MalformedMessage("atom with zero count");
    const std::uint64_t code = code_of(a);
    if (!first && code <= prev) throw MalformedMessage("atoms are not in canonical order");
    prev = code;
    first = false;
    total += a.count;
  }
  if (total != msg.samples) {
    throw MalformedMessage("atom counts sum to " + std::to_string(total) + ", header says " +
                           std::to_string(msg.samples));
  }
}

DenseVector decode(const MaureyMessage& msg, std::size_t dim) {
  validate(msg, dim);
  DenseVector out(dim);
  if (msg.is_zero()) return out;
  const double unit = msg.scale / static_cast<double>(msg.samples);
  for (const MaureyAtom& a : msg.atoms) {
    out[a.index] += static_cast<double>(a.sign) * static_cast<double>(a.count) * unit;
  }
  return out;
}

std::uint64_t list_payload_bits(std::size_t dim, std::uint64_t s) {
  if (dim == 0) throw InvalidParameter("dimension must be positive");
  return s * bit_width_for(2 * static_cast<std::uint64_t>(dim));
}

std::uint64_t rank_payload_bits(std::size_t dim, std::uint64_t s) {
  if (dim == 0) throw InvalidParameter("dimension must be positive");
  check_samples(s);
  mpz_class top = multiset_count(dim, s) - 1;
  if (top == 0) return 0;
  return mpz_sizeinbase(top.get_mpz_t(), 2);
}

BitCost message_cost(const MaureyMessage& msg, std::size_t dim, WireMode mode) {
  BitCost cost{kMessageHeaderBits, 0};
  if (msg.is_zero()) return cost;
  cost.payload_bits = mode == WireMode::list ? list_payload_bits(dim, msg.samples)
                                             : rank_payload_bits(dim, msg.samples);
  return cost;
}

EncodedMessage encode(const MaureyMessage& msg, std::size_t dim, WireMode mode) {
  validate(msg, dim);
  EncodedMessage out;
  out.cost = message_cost(msg, dim, mode);
  Bitstring& bits = out.bits;
  bits.push_bit(mode == WireMode::rank);
  bits.push_bits(msg.samples, 32);
  push_double(bits, msg.scale);
  if (!msg.is_zero()) {
    if (mode == WireMode::list) {
      const unsigned width = bit_width_for(2 * static_cast<std::uint64_t>(dim));
      for (const MaureyAtom& a : msg.atoms) {
        for (std::uint64_t k = 0; k < a.count; ++k) bits.push_bits(code_of(a), width);
      }
    } else {
      bits.push_big(to_bytes(multiset_rank(msg.atoms)), out.cost.payload_bits);
    }
  }
  if (bits.size() != out.cost.total()) {
    throw NumericalFailure("encode: emitted bit count disagrees with metered cost");
  }
  return out;
}

MaureyMessage decode_bits(const Bitstring& bits, std::size_t dim) {
  if (dim == 0) throw InvalidParameter("dimension must be positive");
  BitReader reader(bits);
  const bool rank_mode = reader.read_bit();
  MaureyMessage msg;
  msg.samples = reader.read_bits(32);
  msg.scale = read_double(reader);
  if (msg.samples == 0) throw MalformedMessage("message header has zero samples");
  if (!std::isfinite(msg.scale) || msg.scale < 0.0) {
    throw MalformedMessage("message scale must be finite and nonnegative");
  }
  if (msg.is_zero()) {
    if (reader.remaining() != 0) throw MalformedMessage("zero message carries a payload");
    return msg;
  }
  const std::uint64_t alphabet = 2 * static_cast<std::uint64_t>(dim);
  if (rank_mode) {
    const std::uint64_t width = rank_payload_bits(dim, msg.samples);
    if (reader.remaining() != width) {
      throw MalformedMessage("rank payload has " + std::to_string(reader.remaining()) +
                             " bits, expected " + std::to_string(width));
    }
    mpz_class rank = from_bytes(reader.read_big(width));
    if (rank >= multiset_count(dim, msg.samples)) {
      throw MalformedMessage("multiset rank out of range");
    }
    msg.atoms = multiset_unrank(std::move(rank), alphabet, msg.samples);
  } else {
    const unsigned width = bit_width_for(alphabet);
    if (reader.remaining() != msg.samples * width) {
      throw MalformedMessage("list payload length does not match header");
    }
    std::uint64_t prev = 0;
    for (std::uint64_t k = 0; k < msg.samples; ++k) {
      const std::uint64_t code = reader.read_bits(width);
      if (code >= alphabet) throw MalformedMessage("atom code out of range");
      if (k > 0 && code < prev) throw MalformedMessage("atom codes are not sorted");
      prev = code;
      if (!msg.atoms.empty() && code_of(msg.atoms.back()) == code) {
        ++msg.atoms.back().count;
      } else {
        msg.atoms.push_back(atom_of(code, 1));
      }
    }
  }
  validate(msg, dim);
  return msg;
}

// ---------------------------------------------------------------------------

SpectralMessage spectral_maurey(const SvdResult& basis, std::span<const double> sigma,
                                std::uint64_t s, CounterRng& rng) {
  check_samples(s);
  const std::size_t d = basis.u.dim();
  if (sigma.size() != d) throw DimensionMismatch("spectral_maurey: sigma length mismatch");
  SpectralMessage msg;
  msg.samples = s;
  double total = 0.0;
  for (double x : sigma) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidParameter("spectral_maurey: singular values must be finite and nonnegative");
    }
    total += x;
  }
  if (total == 0.0) return msg;
  msg.scale = total;
  for (const auto& [idx, count] : sample_counts(sigma, s, rng)) {
    SpectralAtom atom{DenseVector(d), DenseVector(d), count};
    for (std::size_t r = 0; r < d; ++r) {
      atom.u[r] = basis.u(r, idx);
      atom.v[r] = basis.v(r, idx);
    }
    msg.atoms.push_back(std::move(atom));
  }
  return msg;
}

SpectralMessage spectral_maurey(const DenseMatrix& w, std::uint64_t s, CounterRng& rng) {
  check_samples(s);
  const SvdResult basis = svd(w);
  return spectral_maurey(basis, basis.sigma, s, rng);
}

DenseMatrix decode(const SpectralMessage& msg, std::size_t dim) {
  DenseMatrix out(dim);
  if (msg.is_zero()) return out;
  if (msg.samples == 0) throw MalformedMessage("spectral message has zero samples");
  std::uint64_t total = 0;
  for (const SpectralAtom& a : msg.atoms) {
    if (a.u.size() != dim || a.v.size() != dim) {
      throw MalformedMessage("spectral atom has wrong dimension");
    }
    total += a.count;
    const double f = msg.scale * static_cast<double>(a.count) / static_cast<double>(msg.samples);
    for (std::size_t r = 0; r < dim; ++r) {
      const double ur = f * a.u[r];
      if (ur == 0.0) continue;
      auto row = out.row(r);
      for (std::size_t c = 0; c < dim; ++c) row[c] += ur * a.v[c];
    }
  }
  if (total != msg.samples) throw MalformedMessage("spectral atom counts do not match header");
  return out;
}

BitCost message_cost(const SpectralMessage& msg, std::size_t dim) {
  BitCost cost{kMessageHeaderBits, 0};
  if (!msg.is_zero()) cost.payload_bits = msg.samples * 2 * static_cast<std::uint64_t>(dim) * 64;
  return cost;
}

}  // namespace slcomm
