#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "sixsim/packet.hpp"
#include "sixsim/types.hpp"

namespace sixsim {

// Which routing adjacency a copy rides on. None means the copy has nowhere
// to go and is dropped by the caller (counted as a no-parent loss).
enum class MacChoice : uint8_t { None, PP, AP };

inline Label complement_label(Label l) {
  if (l == Label::PP) return Label::AP;
  if (l == Label::AP) return Label::PP;
  return Label::None;
}

// Hop-by-hop MAC selection. A labeled copy prefers its own tunnel and falls
// back to the other parent when that tunnel's parent is gone. Unlabeled
// packets exist only under the no-replication strategy, where they follow
// the preferred parent; under any replication strategy an unlabeled packet
// is unroutable.
inline MacChoice select_mac(Label label, bool pp_alive, bool ap_alive,
                            Flooding strategy) {
  switch (label) {
    case Label::PP:
      if (pp_alive) return MacChoice::PP;
      if (ap_alive) return MacChoice::AP;
      return MacChoice::None;
    case Label::AP:
      if (ap_alive) return MacChoice::AP;
      if (pp_alive) return MacChoice::PP;
      return MacChoice::None;
    case Label::None:
      if (strategy == Flooding::None && pp_alive) return MacChoice::PP;
      return MacChoice::None;
  }
  return MacChoice::None;
}

// One copy to put on the wire: the label it carries and the adjacency it
// rides. `via == None` still appears in plans so the caller can account the
// drop; suppressed complements never appear at all.
struct CopyOut {
  Label label = Label::None;
  MacChoice via = MacChoice::None;
};

// At most two copies leave a node per packet event (original + complement).
struct ForwardPlan {
  int count = 0;
  std::array<CopyOut, 2> out{};

  void add(Label label, MacChoice via) {
    out[static_cast<size_t>(count++)] = {label, via};
  }
};

// Copies created at the source. No replication: one unlabeled packet to the
// preferred parent. Replicating strategies: a PP-labeled and an AP-labeled
// copy when an alternate parent exists, otherwise the PP copy alone.
inline ForwardPlan origin_plan(Flooding strategy, bool pp_alive,
                               bool ap_alive) {
  ForwardPlan plan;
  if (strategy == Flooding::None) {
    plan.add(Label::None, select_mac(Label::None, pp_alive, ap_alive, strategy));
    return plan;
  }
  plan.add(Label::PP, select_mac(Label::PP, pp_alive, ap_alive, strategy));
  if (ap_alive)
    plan.add(Label::AP, select_mac(Label::AP, pp_alive, ap_alive, strategy));
  return plan;
}

// Copies created when a relay accepts a packet. `seen` is the flow
// registry's verdict from before this reception was recorded.
//  - none / leafCopy: one output, label preserved.
//  - mid-flood: first sighting fans out original + complement; repeats are
//    switched as-is along their label.
//  - mid-flood-drop: like mid-flood but repeats are discarded.
//  - flood: every reception fans out, seen or not.
// The complementary copy requires both parents; with one parent it would
// chase the original through the same adjacency, so it is never created.
inline ForwardPlan forward_plan(Flooding strategy, Label incoming, bool seen,
                                bool pp_alive, bool ap_alive) {
  ForwardPlan plan;
  bool fan_out = false;
  switch (strategy) {
    case Flooding::None:
    case Flooding::LeafCopy:
      break;
    case Flooding::MidFlood:
      fan_out = !seen;
      break;
    case Flooding::MidFloodDrop:
      if (seen) return plan;  // discard, zero outputs
      fan_out = true;
      break;
    case Flooding::Flood:
      fan_out = true;
      break;
  }
  plan.add(incoming, select_mac(incoming, pp_alive, ap_alive, strategy));
  if (fan_out && pp_alive && ap_alive) {
    Label other = complement_label(incoming);
    plan.add(other, select_mac(other, pp_alive, ap_alive, strategy));
  }
  return plan;
}

// Per-node memory of recently seen packet identities. Bounded: each source
// keeps its last `window` sequence numbers, evicting oldest-first. Sequence
// numbers rise monotonically per source, so exactness only needs the window
// to outlast the copy-reorder distance.
class FlowRegistry {
 public:
  explicit FlowRegistry(int window) : window_(static_cast<size_t>(window)) {}

  // True if `flow` was already recorded here. Records it either way; call
  // exactly once per reception.
  bool check_and_record(FlowKey flow) {
    Ring& r = per_src_[flow.src];
    for (uint32_t s : r.seqs)
      if (s == flow.seq) return true;
    if (r.seqs.size() < window_) {
      r.seqs.push_back(flow.seq);
    } else {
      r.seqs[r.next] = flow.seq;
    }
    r.next = (r.next + 1) % window_;
    return false;
  }

  bool seen(FlowKey flow) const {
    auto it = per_src_.find(flow.src);
    if (it == per_src_.end()) return false;
    for (uint32_t s : it->second.seqs)
      if (s == flow.seq) return true;
    return false;
  }

 private:
  struct Ring {
    std::vector<uint32_t> seqs;
    size_t next = 0;
  };
  size_t window_;
  std::map<NodeId, Ring> per_src_;
};

}  // namespace sixsim
