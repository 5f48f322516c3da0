#pragma once

#include <cstdint>
#include <vector>

#include "sixsim/types.hpp"

namespace sixsim {

enum class SixpCmd : uint8_t { Add, Delete, Clear };

// Who transmits in the cells a transaction installs or removes. The child
// side requests its own uplink capacity (InitiatorTx); a parent managing a
// child's uplink from its end requests InitiatorRx cells.
enum class SixpDir : uint8_t { InitiatorTx, InitiatorRx };

// What triggered a transaction; drives follow-up work when it concludes.
enum class SixpPurpose : uint8_t {
  UtilizationAdd,     // utilization manager grow
  UtilizationDelete,  // utilization manager shrink
  DeadlineAdd,        // deadline manager grow (parent-initiated)
  DeadlineDelete,     // deadline manager shrink (parent-initiated)
  MigrationAdd,       // parent change: rebuild capacity toward the new parent
  MigrationClear,     // parent change: tear down the old pair
  Repair,             // a parented adjacency was left with zero cells
};

struct CellRef {
  int slot = 0;
  int channel_offset = 0;
};

constexpr uint32_t kNoTxn = 0xffffffffu;

// One two-step negotiation. Request and response travel as real frames; the
// schedule mutation happens atomically when the response reaches the
// initiator (Clear collapses to one step and applies at request arrival).
// A transaction that never concludes times out and changes nothing.
struct SixpTransaction {
  enum class State : uint8_t { ReqQueued, RespQueued, Done, Failed };

  uint32_t id = kNoTxn;
  NodeId initiator = kNoNode;
  NodeId peer = kNoNode;
  SixpCmd cmd = SixpCmd::Add;
  SixpDir dir = SixpDir::InitiatorTx;
  SixpPurpose purpose = SixpPurpose::UtilizationAdd;
  int cell_count = 0;
  std::vector<CellRef> candidates;  // Add: proposals; Delete: removal picks
  std::vector<CellRef> grant;       // peer's accepted subset
  int cells_applied = 0;            // set when Done
  Asn issued_at = 0;
  State state = State::ReqQueued;
};

// Signaling frames carry only their transaction reference.
inline uint32_t signaling_id(uint32_t txn, bool is_response) {
  return (txn << 1) | (is_response ? 1u : 0u);
}
inline uint32_t signaling_txn(uint32_t sid) { return sid >> 1; }
inline bool signaling_is_response(uint32_t sid) { return sid & 1u; }

}  // namespace sixsim
