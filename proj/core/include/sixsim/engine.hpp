#pragma once

#include <deque>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "sixsim/config.hpp"
#include "sixsim/dataplane.hpp"
#include "sixsim/metrics.hpp"
#include "sixsim/rng.hpp"
#include "sixsim/rpl.hpp"
#include "sixsim/sf_bdpc.hpp"
#include "sixsim/sf_msf.hpp"
#include "sixsim/sixp.hpp"
#include "sixsim/topology.hpp"
#include "sixsim/tsch.hpp"

namespace sixsim {

// Deadline-manager state a parent keeps per child.
struct BdpcChildState {
  BdpcWindow window;
  Asn cooldown_until = 0;

  explicit BdpcChildState(int capacity) : window(capacity) {}
};

// One parent switch being executed: capacity is rebuilt toward the new
// parent first, then the old pair is torn down (unless the old parent is
// still in use under its other role).
struct Migration {
  NodeId to = kNoNode;
  NodeId from = kNoNode;
  int cells = 1;
  bool add_issued = false;
  bool add_done = false;
  bool clear_issued = false;
  uint32_t add_txn = kNoTxn;
  uint32_t clear_txn = kNoTxn;
};

// Complete per-node simulation state.
struct Node {
  NodeId id = kNoNode;

  // routing
  Rank rank = kNoRank;
  NodeId pp = kNoNode;
  NodeId ap = kNoNode;
  NeighborTable neighbors;
  bool ever_had_pp = false;
  Asn next_dio_at = 0;

  // link layer
  Schedule sched;
  TxQueue queue;

  // child-side utilization manager, one counter pair per parent adjacency
  std::map<NodeId, MsfCounters> msf;
  // parent-side deadline manager, one window per child
  std::map<NodeId, BdpcChildState> deadline;

  // parent-change work in flight
  std::deque<Migration> migrations;
  std::set<NodeId> pending_clear;

  // traffic source
  Asn next_gen_at = 0;
  uint32_t next_seq = 0;

  // duplicate filter
  FlowRegistry flows{64};
};

// One simulation run: builds the node array from the topology, advances the
// slot clock to the horizon, and accumulates the report. Construct, call
// run() once, read the returned report. Tests can instead drive time with
// step_frames() and inspect nodes in between.
class Simulation {
 public:
  Simulation(const RunConfig& cfg, const Topology& topo);

  // Advances to the horizon (if not already there), finalizes, and returns
  // the report.
  RunReport& run();

  // Advance exactly n slotframes (no finalization).
  void step_frames(int n);
  // Advance a single slot.
  void step_slot();

  Asn now() const { return asn_; }
  const Node& node(NodeId id) const { return nodes_[static_cast<size_t>(id)]; }
  const RunConfig& config() const { return cfg_; }

  // Computes rates, ledger totals, per-node charges and lifetimes. Runs once;
  // later calls are no-ops. run() calls it implicitly.
  void finalize();
  RunReport& report() { return report_; }

  // Test hook: at the start of frame `at_frame`, installs an rx cell on
  // `node` (from `peer`) plus the matching tx cell on `peer`. The peer never
  // queues traffic for a non-parent, so the rx cell idles forever — used to
  // pin the cost of an idle listen cell.
  void add_idle_rx_patch(NodeId node, NodeId peer, int slot, int channel_offset,
                         int at_frame);

 private:
  struct IdleRxPatch {
    NodeId node = kNoNode;
    NodeId peer = kNoNode;
    int slot = 0;
    int channel_offset = 0;
    int at_frame = 0;
  };

  Node& nd(NodeId id) { return nodes_[static_cast<size_t>(id)]; }
  NodeStats& stats(NodeId id) {
    return report_.nodes[static_cast<size_t>(id)];
  }
  bool flooding_on() const { return cfg_.flooding != Flooding::None; }
  bool measured(const Packet& p) const {
    return p.created_at >= measure_from_;
  }
  uint64_t stale_horizon() const {
    return static_cast<uint64_t>(cfg_.neighbor_stale_frames) *
           static_cast<uint64_t>(cfg_.slotframe_length);
  }
  static std::pair<NodeId, NodeId> pair_key(NodeId a, NodeId b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }
  bool pair_busy(NodeId a, NodeId b) const {
    return busy_pairs_.count(pair_key(a, b)) > 0;
  }

  // slot phases
  void frame_housekeeping();
  void generation_phase();
  void shared_slot();
  void negotiated_slot(int slot);
  void commit_outcomes();
  void broadcast_dio(Node& n);
  void shared_unicast(Node& n, int idx);
  void retry_or_drop(Node& n, int idx);

  // traffic / forwarding
  void generate_packet(Node& n);
  Asn generation_gap_slots();
  void enqueue_copy(Node& n, const Packet& pkt, NodeId dest);
  void receive_data(Node& r, const Packet& pkt, NodeId from);
  void deliver_at_root(const Packet& pkt);
  NodeId mac_to_node(const Node& n, MacChoice via) const;

  // routing
  void process_dio(Node& n, const Dio& dio);
  void reselect_parents(Node& n);
  void handle_pp_change(Node& n, NodeId old_pp, NodeId new_pp);
  void handle_ap_change(Node& n, NodeId old_ap, NodeId new_ap);
  void retarget_queue(Node& n);
  void prune_stale_neighbors(Node& n);
  void bootstrap_first_cell(Node& n, NodeId peer);

  // cell negotiation; returns the transaction id, kNoTxn when not issued
  uint32_t issue_txn(Node& initiator, NodeId peer, SixpCmd cmd, int count,
                     SixpDir dir, SixpPurpose purpose);
  void process_signaling_delivery(uint32_t sid, Node& receiver);
  bool enqueue_signaling(Node& n, const QueueEntry& e);
  void apply_add(SixpTransaction& t);
  void apply_delete(SixpTransaction& t);
  void apply_clear(SixpTransaction& t);
  void conclude_txn(SixpTransaction& t, bool completed);
  void purge_signaling(Node& n, uint32_t txn_id);
  void note_txn_outcome_for_migrations(const SixpTransaction& t);
  void txn_timeout_sweep();
  void orphan_cell_audit();
  void run_migrations(Node& n);
  void run_pending_clears(Node& n);
  void zero_cell_repair(Node& n);

  // scheduling functions
  void msf_tick(Node& n, NodeId parent, bool used);
  void bdpc_on_arrival(Node& parent, NodeId child, const Packet& pkt);

  RunConfig cfg_;
  Topology topo_;
  RngSet rngs_;
  Asn asn_ = 0;
  Asn horizon_ = 0;
  Asn measure_from_ = 0;  // packets born before this slot are not reported
  std::vector<Node> nodes_;
  std::vector<SlotOutcome> outcome_;  // per-slot scratch, one per node
  std::vector<double> charge_base_;   // per-node charge at measure_from_

  std::map<uint32_t, SixpTransaction> txns_;
  uint32_t next_txn_ = 1;
  std::set<std::pair<NodeId, NodeId>> busy_pairs_;
  std::map<std::pair<NodeId, int>, int> orphan_strikes_;

  std::vector<IdleRxPatch> patches_;

  PacketLedger ledger_;
  RunReport report_;
  bool finalized_ = false;
};

}  // namespace sixsim
