#include "sixsim/rpl.hpp"

#include <algorithm>
#include <cmath>

namespace sixsim {

Rank compute_rank(Rank parent_rank, int base_step, double pdr_estimate) {
  // ETX-style scaling: a 0.75 link makes the hop ~1.33 steps wide.
  double inc = static_cast<double>(base_step) / pdr_estimate;
  return parent_rank + static_cast<Rank>(std::llround(inc));
}

NodeId select_pp(const NeighborTable& nt, Asn now, uint64_t horizon_slots,
                 Rank below_rank) {
  NodeId best = kNoNode;
  Rank best_rank = kNoRank;
  for (const auto& [id, e] : nt) {
    if (e.rank == kNoRank || !entry_fresh(e, now, horizon_slots)) continue;
    if (e.rank >= below_rank) continue;
    if (best == kNoNode || e.rank < best_rank) {
      best = id;
      best_rank = e.rank;
    }
    // map iteration is ascending by id, so on equal rank the first hit
    // already is the lowest id
  }
  return best;
}

bool ap_candidate_ok(ApMode mode, const NeighborTable& nt, NodeId pp,
                     NodeId cand) {
  auto pit = nt.find(pp);
  auto cit = nt.find(cand);
  if (pit == nt.end() || cit == nt.end()) return false;
  const NeighborEntry& p = pit->second;
  const NeighborEntry& c = cit->second;
  switch (mode) {
    case ApMode::Strict:
      return p.pp != kNoNode && c.pp != kNoNode && p.pp == c.pp;
    case ApMode::Medium:
      return c.pp != kNoNode &&
             std::find(p.parent_set.begin(), p.parent_set.end(), c.pp) !=
                 p.parent_set.end();
    case ApMode::Soft:
      for (NodeId x : c.parent_set)
        if (std::find(p.parent_set.begin(), p.parent_set.end(), x) !=
            p.parent_set.end())
          return true;
      return false;
  }
  return false;
}

NodeId select_ap(const NeighborTable& nt, Asn now, uint64_t horizon_slots,
                 NodeId pp, Rank below_rank, ApMode mode) {
  if (pp == kNoNode) return kNoNode;
  NodeId best = kNoNode;
  Rank best_rank = kNoRank;
  for (const auto& [id, e] : nt) {
    if (id == pp) continue;
    if (e.rank == kNoRank || !entry_fresh(e, now, horizon_slots)) continue;
    if (e.rank >= below_rank) continue;
    if (!ap_candidate_ok(mode, nt, pp, id)) continue;
    if (best == kNoNode || e.rank < best_rank) {
      best = id;
      best_rank = e.rank;
    }
  }
  return best;
}

std::vector<NodeId> parent_set_of(const NeighborTable& nt, Asn now,
                                  uint64_t horizon_slots, Rank below_rank,
                                  int cap) {
  std::vector<std::pair<Rank, NodeId>> ranked;
  for (const auto& [id, e] : nt) {
    if (e.rank == kNoRank || !entry_fresh(e, now, horizon_slots)) continue;
    if (e.rank >= below_rank) continue;
    ranked.emplace_back(e.rank, id);
  }
  std::sort(ranked.begin(), ranked.end());
  if (static_cast<int>(ranked.size()) > cap) ranked.resize(cap);
  std::vector<NodeId> out;
  out.reserve(ranked.size());
  for (auto& [r, id] : ranked) out.push_back(id);
  return out;
}

}  // namespace sixsim
