#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "slcomm/sparsify.hpp"

namespace slcomm {

enum class MessageKind {
  iterate,        ///< sparsified (or dense) iterate passed to the next machine
  output,         ///< final sparsified output
  average,        ///< per-machine average sent to the final machine
  sketch_seed,    ///< random-projection seed and shape
  sketch_state,   ///< sketched iterate and running sum
  examples,       ///< truncated raw examples
};

std::string message_kind_name(MessageKind kind);

struct LedgerEntry {
  std::size_t machine = 0;  ///< sending machine, 1-based
  MessageKind kind = MessageKind::iterate;
  std::size_t round = 0;
  BitCost cost;
};

/// Append-only record of every transmitted message.
class CommLedger {
 public:
  explicit CommLedger(std::size_t machines = 0) : per_machine_(machines, 0) {}

  void record(std::size_t machine, MessageKind kind, BitCost cost, std::size_t round = 0);
  void merge(const CommLedger& other);

  [[nodiscard]] std::uint64_t total_bits() const noexcept { return total_; }
  /// Bits sent by a machine (1-based); 0 for machines that never sent.
  [[nodiscard]] std::uint64_t machine_bits(std::size_t machine) const noexcept;
  [[nodiscard]] std::uint64_t max_machine_bits() const noexcept;
  [[nodiscard]] std::uint64_t bits_of_kind(MessageKind kind) const noexcept;
  [[nodiscard]] std::size_t machines() const noexcept { return per_machine_.size(); }
  [[nodiscard]] const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }

  /// Columns: machine,kind,round,header_bits,payload_bits,total_bits
  void write_csv(std::ostream& out) const;

 private:
  std::vector<LedgerEntry> entries_;
  std::vector<std::uint64_t> per_machine_;
  std::uint64_t total_ = 0;
};

/// Meters messages into a ledger and hands the receiver what it would decode.
///
/// Cost is always the exact encoded length. Messages whose encoding is at most
/// `materialize_limit` bits are actually serialized and parsed back, and the
/// round trip is checked; larger ones are passed through unchanged.
class Channel {
 public:
  static constexpr std::uint64_t kDefaultMaterializeLimit = std::uint64_t{1} << 20;
  /// Rank coding costs O(s) big-integer updates, so messages with more
  /// samples than this are charged but not serialized.
  static constexpr std::uint64_t kMaterializeSampleLimit = std::uint64_t{1} << 16;

  Channel(std::size_t dim, WireMode mode, CommLedger& ledger,
          std::uint64_t materialize_limit = kDefaultMaterializeLimit);

  MaureyMessage send(std::size_t from, MessageKind kind, const MaureyMessage& msg,
                     std::size_t round = 0);
  void send_spectral(std::size_t from, MessageKind kind, const SpectralMessage& msg,
                     std::size_t round = 0);
  void send_raw(std::size_t from, MessageKind kind, BitCost cost, std::size_t round = 0);

  [[nodiscard]] std::size_t materialized() const noexcept { return materialized_; }
  [[nodiscard]] WireMode mode() const noexcept { return mode_; }
  [[nodiscard]] CommLedger& ledger() noexcept { return *ledger_; }

 private:
  std::size_t dim_;
  WireMode mode_;
  CommLedger* ledger_;
  std::uint64_t limit_;
  std::size_t materialized_ = 0;
};

}  // namespace slcomm
