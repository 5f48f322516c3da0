#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sixsim/types.hpp"

namespace sixsim {

using Rank = int32_t;
constexpr Rank kNoRank = -1;

// Routing beacon, broadcast on the shared cell. Carries enough of the
// sender's view (its preferred parent and parent set) for receivers to
// evaluate common-ancestor constraints without extra signaling.
struct Dio {
  NodeId sender = kNoNode;
  Rank rank = kNoRank;
  NodeId pp = kNoNode;                // sender's preferred parent
  std::vector<NodeId> parent_set;     // capped, ordered by (rank, id)
};

// What a node remembers about one neighbor, refreshed by every beacon heard
// from it.
struct NeighborEntry {
  Rank rank = kNoRank;
  NodeId pp = kNoNode;
  std::vector<NodeId> parent_set;
  Asn last_heard = 0;
};

// Ordered map so that every iteration (and therefore every selection
// tie-break) is deterministic.
using NeighborTable = std::map<NodeId, NeighborEntry>;

// Rank grows by base_step scaled with expected transmission count toward
// the parent, rounded to the nearest integer.
Rank compute_rank(Rank parent_rank, int base_step, double pdr_estimate);

inline bool entry_fresh(const NeighborEntry& e, Asn now, uint64_t horizon_slots) {
  return now <= e.last_heard + horizon_slots;
}

// Lowest advertised rank wins; ties break toward the lowest node id. Only
// fresh entries with a rank strictly below `below_rank` qualify. Returns
// kNoNode when nothing qualifies. Callers that want switch damping compare
// the winner against the incumbent themselves.
NodeId select_pp(const NeighborTable& nt, Asn now, uint64_t horizon_slots,
                 Rank below_rank);

// Common-ancestor eligibility of `cand` as alternate parent next to `pp`,
// evaluated on the local neighbor table:
//   strict: cand's preferred parent is exactly pp's preferred parent
//   medium: cand's preferred parent appears in pp's parent set
//   soft:   cand's and pp's parent sets intersect
// Entries with the needed fields missing never qualify.
bool ap_candidate_ok(ApMode mode, const NeighborTable& nt, NodeId pp,
                     NodeId cand);

// Alternate parent: the lowest-(rank, id) fresh neighbor, distinct from pp,
// with rank strictly below `below_rank`, passing the mode predicate.
NodeId select_ap(const NeighborTable& nt, Asn now, uint64_t horizon_slots,
                 NodeId pp, Rank below_rank, ApMode mode);

// Fresh neighbors with rank strictly below `below_rank`, ordered by
// (rank, id), truncated to `cap` — the parent set a node advertises.
std::vector<NodeId> parent_set_of(const NeighborTable& nt, Asn now,
                                  uint64_t horizon_slots, Rank below_rank,
                                  int cap);

}  // namespace sixsim
