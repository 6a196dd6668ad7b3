#include "slcomm/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace slcomm {

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))) {}

CounterRng CounterRng::split(std::uint64_t id) const noexcept {
  CounterRng child(0, 0);
  child.key_ = mix(key_ ^ mix(id + 0x632be59bd9b4e019ULL));
  return child;
}

std::uint64_t CounterRng::uniform_index(std::uint64_t n) noexcept {
  // Lemire's nearly divisionless method.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::normal() {
  boost::random::normal_distribution<double> dist;
  return dist(*this);
}

}  // namespace slcomm
