#pragma once

#include <cstdint>

#include "sixsim/types.hpp"

namespace sixsim {

// Identity of an application packet: one (source, sequence) pair per
// generated packet; replicas share it. Sequence numbers are per-source and
// strictly increasing.
struct FlowKey {
  NodeId src = kNoNode;
  uint32_t seq = 0;

  bool operator==(const FlowKey&) const = default;

  // Packed key for hash maps. Node ids are small and sequence numbers stay
  // well below 2^32 at our durations.
  uint64_t packed() const {
    return (static_cast<uint64_t>(static_cast<uint32_t>(src)) << 32) | seq;
  }
};

// One upward application packet (or one replica of it). Copies differ only
// in `label`; identity and timing fields travel unchanged.
struct Packet {
  FlowKey flow;
  Label label = Label::None;
  Asn created_at = 0;   // slot of generation at the source
  int size_bytes = 0;
  int origin_rank = 0;  // source's routing rank at generation time
};

}  // namespace sixsim
