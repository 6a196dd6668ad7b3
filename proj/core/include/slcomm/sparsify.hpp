#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slcomm/bitstream.hpp"
#include "slcomm/rng.hpp"
#include "slcomm/vecspace.hpp"

namespace slcomm {

/// One signed coordinate atom sign * e_index drawn `count` times.
struct MaureyAtom {
  std::uint32_t index = 0;
  std::int8_t sign = 1;
  std::uint64_t count = 0;

  friend bool operator==(const MaureyAtom&, const MaureyAtom&) = default;
};

/// Unbiased s-sparse randomized representation of a vector.
///
/// decode() returns (scale / samples) * sum_atoms count * sign * e_index.
/// Atoms are kept in canonical order: strictly increasing (index, sign) with
/// sign -1 ordered before +1, positive counts summing to `samples`. A zero
/// vector is represented by scale = 0 and no atoms.
struct MaureyMessage {
  double scale = 0.0;
  std::uint64_t samples = 0;
  std::vector<MaureyAtom> atoms;

  [[nodiscard]] bool is_zero() const noexcept { return scale == 0.0; }
  [[nodiscard]] std::size_t distinct_atoms() const noexcept { return atoms.size(); }

  friend bool operator==(const MaureyMessage&, const MaureyMessage&) = default;
};

/// Largest sample count representable in the 32-bit header field.
inline constexpr std::uint64_t kMaxSamples = 0xFFFFFFFFULL;
/// Mode bit + 32-bit sample count + 64-bit IEEE scale.
inline constexpr std::uint64_t kMessageHeaderBits = 97;

/// Draws s i.i.d. atoms sign(w_i) e_i with probability |w_i| / ||w||_1.
/// Throws InvalidParameter for s == 0 or non-finite w, Unsupported for
/// s > kMaxSamples.
MaureyMessage maurey(const DenseVector& w, std::uint64_t s, CounterRng& rng);

/// Checks the canonical-form invariants; throws MalformedMessage.
void validate(const MaureyMessage& msg, std::size_t dim);
DenseVector decode(const MaureyMessage& msg, std::size_t dim);

/// Sample counts for s i.i.d. draws from the distribution proportional to the
/// nonnegative `weights`. Returns (index, count) pairs in increasing index
/// order. Small s uses inverse-CDF sampling per draw; large s uses sequential
/// conditional binomials.
std::vector<std::pair<std::uint32_t, std::uint64_t>> sample_counts(std::span<const double> weights,
                                                                   std::uint64_t s,
                                                                   CounterRng& rng);

enum class WireMode : std::uint8_t {
  list = 0,  ///< s fixed-width codes of ceil(log2 2d) bits
  rank = 1,  ///< rank of the atom multiset, ceil(log2 C(2d+s-1, s)) bits
};

struct BitCost {
  std::uint64_t header_bits = 0;
  std::uint64_t payload_bits = 0;

  [[nodiscard]] std::uint64_t total() const noexcept { return header_bits + payload_bits; }
  friend bool operator==(const BitCost&, const BitCost&) = default;
};

std::uint64_t list_payload_bits(std::size_t dim, std::uint64_t s);
/// Exact ceil(log2 C(2d + s - 1, s)).
std::uint64_t rank_payload_bits(std::size_t dim, std::uint64_t s);
BitCost message_cost(const MaureyMessage& msg, std::size_t dim, WireMode mode);

struct EncodedMessage {
  Bitstring bits;
  BitCost cost;
};

/// Serializes as [mode bit][32-bit s, big-endian][64-bit IEEE scale, big-endian][payload].
EncodedMessage encode(const MaureyMessage& msg, std::size_t dim, WireMode mode);
/// Inverse of encode(); throws MalformedMessage on any inconsistency.
MaureyMessage decode_bits(const Bitstring& bits, std::size_t dim);

/// Rank-one atom u v^T drawn `count` times.
struct SpectralAtom {
  DenseVector u;
  DenseVector v;
  std::uint64_t count = 0;
};

/// Spectral analogue of MaureyMessage: decodes to (scale / samples) *
/// sum count * u v^T with scale = ||W||_{S_1}.
struct SpectralMessage {
  double scale = 0.0;
  std::uint64_t samples = 0;
  std::vector<SpectralAtom> atoms;

  [[nodiscard]] bool is_zero() const noexcept { return scale == 0.0; }
};

SpectralMessage spectral_maurey(const DenseMatrix& w, std::uint64_t s, CounterRng& rng);
/// Same draw from a known decomposition W = U diag(sigma) V^T, sigma >= 0.
SpectralMessage spectral_maurey(const SvdResult& basis, std::span<const double> sigma,
                                std::uint64_t s, CounterRng& rng);
DenseMatrix decode(const SpectralMessage& msg, std::size_t dim);
/// Header plus every transmitted factor entry at 64 bits: 97 + s * 2d * 64.
BitCost message_cost(const SpectralMessage& msg, std::size_t dim);

}  // namespace slcomm
