#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace slcomm {

/// Packed bit string, most significant bit first within each byte.
class Bitstring {
 public:
  Bitstring() = default;
  Bitstring(std::vector<std::uint8_t> bytes, std::size_t bit_count);

  [[nodiscard]] std::size_t size() const noexcept { return bits_; }
  [[nodiscard]] const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  [[nodiscard]] bool bit(std::size_t i) const noexcept {
    return ((bytes_[i >> 3] >> (7 - (i & 7))) & 1U) != 0U;
  }

  void push_bit(bool b);
  /// Appends the low `width` bits of `value`, high bit first. width <= 64.
  void push_bits(std::uint64_t value, unsigned width);
  /// Appends `width` bits of a big-endian magnitude (leading zero bytes allowed).
  void push_big(const std::vector<std::uint8_t>& magnitude_be, std::size_t width);

  friend bool operator==(const Bitstring&, const Bitstring&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

/// Sequential reader over a Bitstring. Reading past the end throws
/// MalformedMessage.
class BitReader {
 public:
  explicit BitReader(const Bitstring& bits) noexcept : bits_(&bits) {}

  bool read_bit();
  std::uint64_t read_bits(unsigned width);
  /// Reads `width` bits into a big-endian magnitude of ceil(width / 8) bytes.
  std::vector<std::uint8_t> read_big(std::size_t width);

  [[nodiscard]] std::size_t position() const noexcept { return pos_; }
  [[nodiscard]] std::size_t remaining() const noexcept { return bits_->size() - pos_; }

 private:
  void require(std::size_t n) const;
  const Bitstring* bits_;
  std::size_t pos_ = 0;
};

}  // namespace slcomm
