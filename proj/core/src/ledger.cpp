#include "slcomm/ledger.hpp"

#include <algorithm>
#include <ostream>

#include "slcomm/errors.hpp"

namespace slcomm {

std::string message_kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::iterate: return "iterate";
    case MessageKind::output: return "output";
    case MessageKind::average: return "average";
    case MessageKind::sketch_seed: return "sketch_seed";
    case MessageKind::sketch_state: return "sketch_state";
    case MessageKind::examples: return "examples";
  }
  return "unknown";
}

void CommLedger::record(std::size_t machine, MessageKind kind, BitCost cost, std::size_t round) {
  if (machine == 0) throw InvalidParameter("ledger machine ids are 1-based");
  if (machine > per_machine_.size()) per_machine_.resize(machine, 0);
  entries_.push_back({machine, kind, round, cost});
  per_machine_[machine - 1] += cost.total();
  total_ += cost.total();
}

void CommLedger::merge(const CommLedger& other) {
  for (const LedgerEntry& e : other.entries_) record(e.machine, e.kind, e.cost, e.round);
}

std::uint64_t CommLedger::machine_bits(std::size_t machine) const noexcept {
  if (machine == 0 || machine > per_machine_.size()) return 0;
  return per_machine_[machine - 1];
}

std::uint64_t CommLedger::max_machine_bits() const noexcept {
  return per_machine_.empty() ? 0 : *std::max_element(per_machine_.begin(), per_machine_.end());
}

std::uint64_t CommLedger::bits_of_kind(MessageKind kind) const noexcept {
  std::uint64_t s = 0;
  for (const LedgerEntry& e : entries_) {
    if (e.kind == kind) s += e.cost.total();
  }
  return s;
}

void CommLedger::write_csv(std::ostream& out) const {
  out << "machine,kind,round,header_bits,payload_bits,total_bits\n";
  for (const LedgerEntry& e : entries_) {
    out << e.machine << ',' << message_kind_name(e.kind) << ',' << e.round << ','
        << e.cost.header_bits << ',' << e.cost.payload_bits << ',' << e.cost.total() << '\n';
  }
}

Channel::Channel(std::size_t dim, WireMode mode, CommLedger& ledger,
                 std::uint64_t materialize_limit)
    : dim_(dim), mode_(mode), ledger_(&ledger), limit_(materialize_limit) {
  if (dim == 0) throw InvalidParameter("Channel: dimension must be positive");
}

MaureyMessage Channel::send(std::size_t from, MessageKind kind, const MaureyMessage& msg,
                            std::size_t round) {
  const BitCost cost = message_cost(msg, dim_, mode_);
  ledger_->record(from, kind, cost, round);
  if (cost.total() > limit_ || msg.samples > kMaterializeSampleLimit) return msg;
  const EncodedMessage wire = encode(msg, dim_, mode_);
  MaureyMessage received = decode_bits(wire.bits, dim_);
  ++materialized_;
  if (!(received == msg)) throw NumericalFailure("Channel: message did not survive the wire");
  return received;
}

void Channel::send_spectral(std::size_t from, MessageKind kind, const SpectralMessage& msg,
                            std::size_t round) {
  ledger_->record(from, kind, message_cost(msg, dim_), round);
}

void Channel::send_raw(std::size_t from, MessageKind kind, BitCost cost, std::size_t round) {
  ledger_->record(from, kind, cost, round);
}

}  // namespace slcomm
