#include "slcomm/bitstream.hpp"

#include <string>
#include <utility>

#include "slcomm/errors.hpp"

namespace slcomm {

Bitstring::Bitstring(std::vector<std::uint8_t> bytes, std::size_t bit_count)
    : bytes_(std::move(bytes)), bits_(bit_count) {
  if (bytes_.size() != (bits_ + 7) / 8) {
    throw MalformedMessage("Bitstring: byte count does not match bit count");
  }
}

void Bitstring::push_bit(bool b) {
  if ((bits_ & 7) == 0) bytes_.push_back(0);
  if (b) bytes_.back() |= static_cast<std::uint8_t>(1U << (7 - (bits_ & 7)));
  ++bits_;
}

void Bitstring::push_bits(std::uint64_t value, unsigned width) {
  for (unsigned i = width; i-- > 0;) push_bit(((value >> i) & 1U) != 0U);
}

void Bitstring::push_big(const std::vector<std::uint8_t>& magnitude_be, std::size_t width) {
  const std::size_t avail = magnitude_be.size() * 8;
  for (std::size_t i = width; i-- > 0;) {
    bool b = false;
    if (i < avail) {
      const std::size_t byte = magnitude_be.size() - 1 - i / 8;
      b = ((magnitude_be[byte] >> (i % 8)) & 1U) != 0U;
    }
    push_bit(b);
  }
}

void BitReader::require(std::size_t n) const {
  if (n > remaining()) {
    throw MalformedMessage("truncated bitstring: need " + std::to_string(n) + " bits, have " +
                           std::to_string(remaining()));
  }
}

bool BitReader::read_bit() {
  require(1);
  return bits_->bit(pos_++);
}

std::uint64_t BitReader::read_bits(unsigned width) {
  require(width);
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(bits_->bit(pos_++));
  return v;
}

std::vector<std::uint8_t> BitReader::read_big(std::size_t width) {
  require(width);
  std::vector<std::uint8_t> out((width + 7) / 8, 0);
  for (std::size_t i = width; i-- > 0;) {
    if (bits_->bit(pos_++)) out[out.size() - 1 - i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
  }
  return out;
}

}  // namespace slcomm
