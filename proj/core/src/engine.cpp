#include "sixsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace sixsim {

Simulation::Simulation(const RunConfig& cfg, const Topology& topo)
    : cfg_(cfg), topo_(topo), rngs_(cfg.seed) {
  const int n = topo_.node_count();
  nodes_.reserve(static_cast<size_t>(n));
  for (NodeId id = 0; id < n; ++id) {
    Node node;
    node.id = id;
    node.sched = Schedule(cfg_.slotframe_length);
    node.queue = TxQueue(cfg_.queue_capacity);
    node.flows = FlowRegistry(cfg_.flow_window);
    nodes_.push_back(std::move(node));
  }
  nodes_[0].rank = cfg_.rank_base_min;  // the sink anchors the rank space

  outcome_.assign(static_cast<size_t>(n), SlotOutcome::Sleep);
  horizon_ = static_cast<Asn>(cfg_.duration_frames) *
             static_cast<Asn>(cfg_.slotframe_length);
  measure_from_ = static_cast<Asn>(cfg_.measure_after_frames) *
                  static_cast<Asn>(cfg_.slotframe_length);
  charge_base_.assign(static_cast<size_t>(n), 0.0);

  // Source phases, drawn in id order so the jitter stream assignment is
  // reproducible. Each source starts at a uniform point of one period past
  // the warmup, then free-runs on its own jittered gaps.
  const Asn warmup = static_cast<Asn>(cfg_.warmup_frames) *
                     static_cast<Asn>(cfg_.slotframe_length);
  for (NodeId id = 1; id < n; ++id) {
    double offset_ms = rngs_.jitter.next_double() * cfg_.pk_period_s * 1000.0;
    nodes_[static_cast<size_t>(id)].next_gen_at =
        warmup + static_cast<Asn>(std::llround(offset_ms / cfg_.timeslot_ms));
  }

  report_.seed = cfg_.seed;
  report_.pk_period_s = cfg_.pk_period_s;
  report_.nodes.resize(static_cast<size_t>(n));
}

RunReport& Simulation::run() {
  while (asn_ < horizon_) step_slot();
  finalize();
  return report_;
}

void Simulation::step_frames(int n) {
  const Asn steps =
      static_cast<Asn>(n) * static_cast<Asn>(cfg_.slotframe_length);
  for (Asn i = 0; i < steps; ++i) step_slot();
}

void Simulation::step_slot() {
  if (asn_ == measure_from_ && measure_from_ > 0) {
    for (size_t i = 0; i < nodes_.size(); ++i)
      charge_base_[i] = report_.nodes[i].energy.charge_c(cfg_.charge);
  }
  const int slot = static_cast<int>(asn_ % cfg_.slotframe_length);
  if (slot == 0) frame_housekeeping();
  generation_phase();
  if (slot == 0)
    shared_slot();
  else
    negotiated_slot(slot);
  commit_outcomes();
  ++asn_;
}

void Simulation::add_idle_rx_patch(NodeId node, NodeId peer, int slot,
                                   int channel_offset, int at_frame) {
  patches_.push_back({node, peer, slot, channel_offset, at_frame});
}

// ---------------------------------------------------------------- frame ---

void Simulation::frame_housekeeping() {
  const int frame = static_cast<int>(asn_ / cfg_.slotframe_length);
  for (const IdleRxPatch& p : patches_) {
    if (p.at_frame != frame) continue;
    nd(p.node).sched.install(p.slot,
                             {p.peer, CellDir::Rx, p.channel_offset});
    nd(p.peer).sched.install(p.slot,
                             {p.node, CellDir::Tx, p.channel_offset});
  }

  txn_timeout_sweep();
  orphan_cell_audit();

  for (Node& n : nodes_) {
    prune_stale_neighbors(n);
    if (n.id != kRoot) reselect_parents(n);
  }
  for (Node& n : nodes_) {
    run_migrations(n);
    run_pending_clears(n);
    zero_cell_repair(n);
  }
}

void Simulation::generation_phase() {
  for (size_t i = 1; i < nodes_.size(); ++i) {
    Node& n = nodes_[i];
    while (n.next_gen_at <= asn_) {
      generate_packet(n);
      n.next_gen_at += generation_gap_slots();
    }
  }
}

void Simulation::commit_outcomes() {
  for (size_t i = 0; i < nodes_.size(); ++i)
    report_.nodes[i].energy.add(outcome_[i]);
}

// --------------------------------------------------------------- traffic ---

Asn Simulation::generation_gap_slots() {
  double gap_ms = cfg_.pk_period_s * 1000.0 *
                  (1.0 + rngs_.jitter.next_range(-cfg_.pk_variance,
                                                 cfg_.pk_variance));
  long long slots = std::llround(gap_ms / cfg_.timeslot_ms);
  return static_cast<Asn>(std::max(1ll, slots));
}

NodeId Simulation::mac_to_node(const Node& n, MacChoice via) const {
  switch (via) {
    case MacChoice::PP: return n.pp;
    case MacChoice::AP: return n.ap;
    case MacChoice::None: break;
  }
  return kNoNode;
}

void Simulation::generate_packet(Node& n) {
  Packet pkt;
  pkt.flow = {n.id, n.next_seq++};
  pkt.created_at = asn_;
  pkt.size_bytes = cfg_.pk_size_bytes;
  pkt.origin_rank = n.rank == kNoRank ? 0 : n.rank;

  ++stats(n.id).generated;
  // Only packets born inside the measurement window enter the report and the
  // ledger; earlier ones still travel (keeping the network warm) but every
  // later bookkeeping call skips them because they were never registered.
  if (pkt.created_at >= measure_from_) {
    ++report_.n_tx;
    ledger_.on_generated(pkt.flow);
  }

  const bool pp_alive = n.pp != kNoNode;
  const bool ap_alive = n.ap != kNoNode;
  ForwardPlan plan = origin_plan(cfg_.flooding, pp_alive, ap_alive);
  for (int i = 0; i < plan.count; ++i) {
    const CopyOut& c = plan.out[static_cast<size_t>(i)];
    NodeId dest = mac_to_node(n, c.via);
    if (dest == kNoNode) {
      if (measured(pkt)) ++report_.no_parent_drops;
      ledger_.on_copy_suppressed(pkt.flow, LossCause::NoParent);
      continue;
    }
    Packet copy = pkt;
    copy.label = c.label;
    enqueue_copy(n, copy, dest);
  }
}

void Simulation::enqueue_copy(Node& n, const Packet& pkt, NodeId dest) {
  QueueEntry e;
  e.is_signaling = false;
  e.pkt = pkt;
  e.dest = dest;
  e.retries_left = cfg_.max_retries;
  e.enqueued_at = asn_;
  if (n.queue.push(e)) {
    ledger_.on_instance_live(pkt.flow);
    ++stats(n.id).enq_ok;
  } else {
    if (measured(pkt)) ++report_.queue_drops;
    ledger_.on_copy_suppressed(pkt.flow, LossCause::QueueReject);
    ++stats(n.id).enq_rejected;
  }
}

void Simulation::receive_data(Node& r, const Packet& pkt, NodeId from) {
  ++stats(r.id).forwarded;
  if (cfg_.sf_kind == SfKind::Bdpc) bdpc_on_arrival(r, from, pkt);

  if (r.id == kRoot) {
    deliver_at_root(pkt);
    return;
  }

  bool seen = r.flows.check_and_record(pkt.flow);
  const bool pp_alive = r.pp != kNoNode;
  const bool ap_alive = r.ap != kNoNode;
  ForwardPlan plan =
      forward_plan(cfg_.flooding, pkt.label, seen, pp_alive, ap_alive);
  if (plan.count == 0) {
    if (measured(pkt)) ++report_.discard_drops;
    ledger_.on_copy_suppressed(pkt.flow, LossCause::Discard);
    return;
  }
  for (int i = 0; i < plan.count; ++i) {
    const CopyOut& c = plan.out[static_cast<size_t>(i)];
    NodeId dest = mac_to_node(r, c.via);
    if (dest == kNoNode) {
      if (measured(pkt)) ++report_.no_parent_drops;
      ledger_.on_copy_suppressed(pkt.flow, LossCause::NoParent);
      continue;
    }
    Packet copy = pkt;
    copy.label = c.label;
    enqueue_copy(r, copy, dest);
  }
}

void Simulation::deliver_at_root(const Packet& pkt) {
  Node& root = nd(kRoot);
  bool dup = root.flows.check_and_record(pkt.flow);
  if (pkt.created_at < measure_from_) return;  // warmed the net, not counted
  if (dup) {
    ++report_.duplicates;
    ledger_.on_sink_consumed(pkt.flow, false);
    return;
  }
  double delay_ms =
      static_cast<double>(asn_ - pkt.created_at) * cfg_.timeslot_ms;
  report_.record_delivery(delay_ms, cfg_.max_delay_ms);
  ledger_.on_sink_consumed(pkt.flow, true);
}

// ----------------------------------------------------------------- slots ---

namespace {
// A failed attempt either burns one retry or, with the budget exhausted,
// drops the entry.
struct RetryOutcome {
  bool dropped = false;
};
}  // namespace

void Simulation::shared_slot() {
  std::fill(outcome_.begin(), outcome_.end(), SlotOutcome::RxIdle);

  // Who wants the slot: nodes with a sendable negotiation frame toward a
  // peer the pair holds no cells with (in either direction — a cell in
  // either role can carry signaling) outrank nodes with an advertisement due.
  std::vector<std::pair<NodeId, int>> sig;
  std::vector<NodeId> dio;
  for (Node& n : nodes_) {
    const auto& q = n.queue.raw();
    for (size_t i = 0; i < q.size(); ++i) {
      const QueueEntry& e = q[i];
      if (!e.is_signaling) break;  // negotiation frames prefix the queue
      if (e.enqueued_at < asn_ &&
          n.sched.count_toward(e.dest, CellDir::Tx) == 0 &&
          n.sched.count_toward(e.dest, CellDir::Rx) == 0) {
        sig.push_back({n.id, static_cast<int>(i)});
        break;
      }
    }
    if (n.rank != kNoRank && asn_ >= n.next_dio_at) dio.push_back(n.id);
  }

  if (!sig.empty()) {
    size_t w = sig.size() == 1
                   ? 0
                   : static_cast<size_t>(rngs_.contention.next_below(sig.size()));
    shared_unicast(nd(sig[w].first), sig[w].second);
  } else if (!dio.empty()) {
    size_t w = dio.size() == 1
                   ? 0
                   : static_cast<size_t>(rngs_.contention.next_below(dio.size()));
    broadcast_dio(nd(dio[w]));
  }
}

void Simulation::broadcast_dio(Node& n) {
  outcome_[static_cast<size_t>(n.id)] = SlotOutcome::TxDataOnly;
  ++report_.dio_sent;
  int jitter = static_cast<int>(rngs_.jitter.next_below(3)) - 1;
  n.next_dio_at = asn_ + static_cast<Asn>(cfg_.dio_period_frames + jitter) *
                             static_cast<Asn>(cfg_.slotframe_length);

  Dio d;
  d.sender = n.id;
  d.rank = n.rank;
  d.pp = n.pp;
  d.parent_set = parent_set_of(n.neighbors, asn_, stale_horizon(), n.rank,
                               cfg_.parent_set_cap);

  for (NodeId nb : topo_.neighbors(n.id)) {
    if (!rngs_.link.chance(topo_.link_pdr(n.id, nb))) continue;
    outcome_[static_cast<size_t>(nb)] = SlotOutcome::RxDataOnly;
    ++report_.dio_heard;
    process_dio(nd(nb), d);
  }
}

void Simulation::shared_unicast(Node& n, int idx) {
  QueueEntry e = n.queue[idx];  // survives queue mutation below
  bool data_ok = false;
  // Everyone in range decodes or misses independently; non-addressees that
  // decode pay the overhearing cost.
  for (NodeId nb : topo_.neighbors(n.id)) {
    bool ok = rngs_.link.chance(topo_.link_pdr(n.id, nb));
    if (nb == e.dest) {
      data_ok = ok;
      outcome_[static_cast<size_t>(nb)] =
          ok ? SlotOutcome::RxDataTxAck : SlotOutcome::RxIdle;
    } else if (ok) {
      outcome_[static_cast<size_t>(nb)] = SlotOutcome::RxDataOnly;
    }
  }

  if (data_ok) {
    bool ack_ok = rngs_.link.chance(topo_.link_pdr(n.id, e.dest));
    if (ack_ok) {
      outcome_[static_cast<size_t>(n.id)] = SlotOutcome::TxDataRxAck;
      ++stats(n.id).handed_off;
      n.queue.erase(idx);
    } else {
      outcome_[static_cast<size_t>(n.id)] = SlotOutcome::TxDataOnly;
      retry_or_drop(n, idx);
    }
    process_signaling_delivery(e.signaling_id, nd(e.dest));
  } else {
    outcome_[static_cast<size_t>(n.id)] = SlotOutcome::TxDataOnly;
    retry_or_drop(n, idx);
  }
}

void Simulation::negotiated_slot(int slot) {
  std::fill(outcome_.begin(), outcome_.end(), SlotOutcome::Sleep);

  for (Node& n : nodes_) {
    const auto& c = n.sched.at(slot);
    if (!c || c->dir != CellDir::Tx) continue;
    const NodeId peer = c->peer;
    const bool parent_cell =
        peer == n.pp || (flooding_on() && peer == n.ap);

    const auto& mirror = nd(peer).sched.at(slot);
    const bool listening =
        mirror && mirror->dir == CellDir::Rx && mirror->peer == n.id;

    int idx = n.queue.first_for(peer, asn_);

    // A pair cell carries negotiation frames in either direction; the
    // owner's own signaling goes first, then the peer's (role-swapped),
    // and only then the owner's data.
    if ((idx < 0 || !n.queue[idx].is_signaling) && listening) {
      int swap_idx = -1;
      const auto& pq = nd(peer).queue.raw();
      for (size_t i = 0; i < pq.size(); ++i) {
        const QueueEntry& pe = pq[i];
        if (!pe.is_signaling) break;
        if (pe.dest == n.id && pe.enqueued_at < asn_) {
          swap_idx = static_cast<int>(i);
          break;
        }
      }
      if (swap_idx >= 0) {
        Node& p = nd(peer);
        QueueEntry e = p.queue[swap_idx];  // survives queue mutation below
        if (rngs_.link.chance(topo_.link_pdr(peer, n.id))) {
          outcome_[static_cast<size_t>(n.id)] = SlotOutcome::RxDataTxAck;
          if (rngs_.link.chance(topo_.link_pdr(peer, n.id))) {
            outcome_[static_cast<size_t>(peer)] = SlotOutcome::TxDataRxAck;
            ++stats(peer).handed_off;
            p.queue.erase(swap_idx);
          } else {
            outcome_[static_cast<size_t>(peer)] = SlotOutcome::TxDataOnly;
            retry_or_drop(p, swap_idx);
          }
          process_signaling_delivery(e.signaling_id, n);
        } else {
          outcome_[static_cast<size_t>(peer)] = SlotOutcome::TxDataOnly;
          outcome_[static_cast<size_t>(n.id)] = SlotOutcome::RxIdle;
          retry_or_drop(p, swap_idx);
        }
        // the cell elapsed without the owner transmitting on it
        if (parent_cell) msf_tick(n, peer, false);
        continue;
      }
    }

    if (idx < 0) {
      // nothing to send: the radio stays off for the whole cell
      if (parent_cell) msf_tick(n, peer, false);
      continue;
    }

    QueueEntry e = n.queue[idx];  // survives queue mutation below
    bool data_ok = listening && rngs_.link.chance(topo_.link_pdr(n.id, peer));
    if (data_ok) {
      outcome_[static_cast<size_t>(peer)] = SlotOutcome::RxDataTxAck;
      bool ack_ok = rngs_.link.chance(topo_.link_pdr(n.id, peer));
      if (ack_ok) {
        outcome_[static_cast<size_t>(n.id)] = SlotOutcome::TxDataRxAck;
        ++stats(n.id).handed_off;
        if (!e.is_signaling) ledger_.on_handoff(e.pkt.flow);
        n.queue.erase(idx);
      } else {
        outcome_[static_cast<size_t>(n.id)] = SlotOutcome::TxDataOnly;
        retry_or_drop(n, idx);
      }
      // Receiver processing runs after the sender settled its queue, so a
      // concluding transaction can purge the sender's copy of this frame.
      if (e.is_signaling)
        process_signaling_delivery(e.signaling_id, nd(peer));
      else
        receive_data(nd(peer), e.pkt, n.id);
    } else {
      outcome_[static_cast<size_t>(n.id)] = SlotOutcome::TxDataOnly;
      if (listening)
        outcome_[static_cast<size_t>(peer)] = SlotOutcome::RxIdle;
      retry_or_drop(n, idx);
    }
    if (parent_cell) msf_tick(n, peer, true);
  }

  // rx cells that heard nothing still listened
  for (Node& n : nodes_) {
    const auto& c = n.sched.at(slot);
    if (c && c->dir == CellDir::Rx &&
        outcome_[static_cast<size_t>(n.id)] == SlotOutcome::Sleep)
      outcome_[static_cast<size_t>(n.id)] = SlotOutcome::RxIdle;
  }
}

void Simulation::retry_or_drop(Node& n, int idx) {
  QueueEntry& e = n.queue[idx];
  if (e.retries_left > 0) {
    --e.retries_left;
    return;
  }
  if (!e.is_signaling) {
    ledger_.on_instance_dead(e.pkt.flow, LossCause::RetryExhaust);
    if (measured(e.pkt)) ++report_.retry_drops;
  }
  ++stats(n.id).retry_dropped;
  n.queue.erase(idx);
}

// --------------------------------------------------------------- routing ---

void Simulation::process_dio(Node& n, const Dio& dio) {
  NeighborEntry& e = n.neighbors[dio.sender];
  e.rank = dio.rank;
  e.pp = dio.pp;
  e.parent_set = dio.parent_set;
  e.last_heard = asn_;
  if (n.id != kRoot) reselect_parents(n);
}

void Simulation::prune_stale_neighbors(Node& n) {
  const uint64_t hz = stale_horizon();
  for (auto it = n.neighbors.begin(); it != n.neighbors.end();) {
    if (entry_fresh(it->second, asn_, hz))
      ++it;
    else
      it = n.neighbors.erase(it);
  }
}

void Simulation::reselect_parents(Node& n) {
  const uint64_t hz = stale_horizon();
  auto usable = [&](NodeId id) {
    auto it = n.neighbors.find(id);
    return it != n.neighbors.end() && entry_fresh(it->second, asn_, hz);
  };

  NodeId old_pp = n.pp;
  if (n.pp != kNoNode && !usable(n.pp)) n.pp = kNoNode;
  if (n.pp != kNoNode)
    n.rank = compute_rank(n.neighbors.at(n.pp).rank, cfg_.rank_base_step,
                          topo_.link_pdr(n.id, n.pp));
  else
    n.rank = kNoRank;

  Rank below =
      n.pp != kNoNode ? n.rank : std::numeric_limits<Rank>::max();
  NodeId best = select_pp(n.neighbors, asn_, hz, below);

  bool switched = false;
  if (n.pp == kNoNode) {
    switched = best != kNoNode;
  } else if (best != kNoNode && best != n.pp) {
    // switch damping: a challenger must beat the incumbent by half a step
    switched = n.neighbors.at(best).rank + cfg_.rank_base_step / 2 <=
               n.neighbors.at(n.pp).rank;
  }
  if (switched) {
    handle_pp_change(n, old_pp, best);
    n.rank = compute_rank(n.neighbors.at(n.pp).rank, cfg_.rank_base_step,
                          topo_.link_pdr(n.id, n.pp));
  } else if (n.pp == kNoNode && old_pp != kNoNode) {
    handle_pp_change(n, old_pp, kNoNode);
  }

  NodeId ap_new = n.pp != kNoNode
                      ? select_ap(n.neighbors, asn_, hz, n.pp, n.rank,
                                  cfg_.ap_mode)
                      : kNoNode;
  if (ap_new != n.ap) handle_ap_change(n, n.ap, ap_new);
}

void Simulation::handle_pp_change(Node& n, NodeId old_pp, NodeId new_pp) {
  n.pp = new_pp;
  if (old_pp != kNoNode) {
    ++report_.parent_changes;
    n.msf.erase(old_pp);
  }
  if (new_pp != kNoNode) n.msf.erase(new_pp);  // counters start fresh

  if (new_pp == kNoNode) {
    // orphaned: the old pair is torn down once it is idle in both roles
    if (old_pp != kNoNode && old_pp != n.ap) n.pending_clear.insert(old_pp);
  } else if (!n.ever_had_pp) {
    n.ever_had_pp = true;
    bootstrap_first_cell(n, new_pp);
  } else if (old_pp != kNoNode) {
    // capacity follows the parent: rebuild toward the new one before the
    // old pair goes away
    Migration m;
    m.to = new_pp;
    m.from = old_pp;
    m.cells = std::max(1, n.sched.count_toward(old_pp, CellDir::Tx));
    n.migrations.push_back(m);
  }
  // re-joining after an outage has no old pair; the zero-cell repair
  // rebuilds capacity toward the new parent
  retarget_queue(n);
}

void Simulation::handle_ap_change(Node& n, NodeId old_ap, NodeId new_ap) {
  n.ap = new_ap;
  ++report_.ap_changes;
  if (flooding_on() && old_ap != kNoNode && old_ap != n.pp) {
    if (new_ap != kNoNode) {
      Migration m;
      m.to = new_ap;
      m.from = old_ap;
      m.cells = std::max(1, n.sched.count_toward(old_ap, CellDir::Tx));
      n.migrations.push_back(m);
    } else {
      n.pending_clear.insert(old_ap);
    }
  } else if (flooding_on() && new_ap != kNoNode &&
             n.sched.count_toward(new_ap, CellDir::Tx) == 0 &&
             n.sched.count_toward(new_ap, CellDir::Rx) == 0) {
    // freshly adopted alternate with no prior pair: seed it one cell the
    // same way a first parent gets one, so the copy path exists at once
    bootstrap_first_cell(n, new_ap);
  }
  retarget_queue(n);
}

void Simulation::retarget_queue(Node& n) {
  const bool pp_alive = n.pp != kNoNode;
  const bool ap_alive = n.ap != kNoNode;
  auto& q = n.queue.raw();
  for (auto it = q.begin(); it != q.end();) {
    if (it->is_signaling) {
      ++it;
      continue;
    }
    MacChoice via =
        select_mac(it->pkt.label, pp_alive, ap_alive, cfg_.flooding);
    NodeId dest = mac_to_node(n, via);
    if (dest == kNoNode) {
      ledger_.on_instance_dead(it->pkt.flow, LossCause::NoParent);
      if (measured(it->pkt)) ++report_.no_parent_drops;
      ++stats(n.id).retargeted_away;
      it = q.erase(it);
    } else {
      it->dest = dest;
      ++it;
    }
  }
}

void Simulation::bootstrap_first_cell(Node& n, NodeId peer) {
  // A brand-new parent adjacency gets one cell pair installed directly;
  // with no cells there is no way to carry a negotiation toward the parent
  // besides the shared slot, and the network-entry path sidesteps that.
  Node& p = nd(peer);
  std::vector<int> both;
  for (int s : n.sched.free_slots())
    if (p.sched.slot_free(s)) both.push_back(s);
  if (both.empty()) return;  // repair will negotiate one instead
  int slot = both[static_cast<size_t>(rngs_.sixp.next_below(both.size()))];
  int ch = static_cast<int>(rngs_.sixp.next_below(cfg_.channels));
  n.sched.install(slot, {peer, CellDir::Tx, ch});
  p.sched.install(slot, {n.id, CellDir::Rx, ch});
}

// ----------------------------------------------------------- negotiation ---

bool Simulation::enqueue_signaling(Node& n, const QueueEntry& e) {
  if (n.queue.push(e)) {
    ++stats(n.id).enq_ok;
    return true;
  }
  // Control frames get admission priority on a full queue: the youngest
  // data frame makes room. Only a queue full of control turns one away.
  auto& q = n.queue.raw();
  for (size_t i = q.size(); i-- > 0;) {
    if (q[i].is_signaling) continue;
    ledger_.on_instance_dead(q[i].pkt.flow, LossCause::QueueReject);
    if (measured(q[i].pkt)) ++report_.queue_drops;
    ++stats(n.id).displaced;
    q.erase(q.begin() + static_cast<std::ptrdiff_t>(i));
    break;
  }
  if (!n.queue.push(e)) {
    ++stats(n.id).enq_rejected;
    return false;
  }
  ++stats(n.id).enq_ok;
  return true;
}

uint32_t Simulation::issue_txn(Node& initiator, NodeId peer, SixpCmd cmd,
                               int count, SixpDir dir, SixpPurpose purpose) {
  if (pair_busy(initiator.id, peer)) {
    ++report_.sixp_busy_rejects;
    return kNoTxn;
  }

  SixpTransaction t;
  t.id = next_txn_;
  t.initiator = initiator.id;
  t.peer = peer;
  t.cmd = cmd;
  t.dir = dir;
  t.purpose = purpose;
  t.cell_count = count;
  t.issued_at = asn_;

  if (cmd == SixpCmd::Add) {
    std::vector<int> free = initiator.sched.free_slots();
    int want = count * cfg_.sixp_candidate_factor;
    int take = std::min<int>(want, static_cast<int>(free.size()));
    for (int i = 0; i < take; ++i) {
      size_t j = static_cast<size_t>(i) +
                 static_cast<size_t>(rngs_.sixp.next_below(free.size() -
                                                           static_cast<size_t>(i)));
      std::swap(free[static_cast<size_t>(i)], free[j]);
      t.candidates.push_back(
          {free[static_cast<size_t>(i)],
           static_cast<int>(rngs_.sixp.next_below(cfg_.channels))});
    }
    if (t.candidates.empty()) return kNoTxn;  // schedule completely full
  } else if (cmd == SixpCmd::Delete) {
    CellDir d = dir == SixpDir::InitiatorTx ? CellDir::Tx : CellDir::Rx;
    std::vector<int> mine = initiator.sched.slots_toward(peer, d);
    int take = std::min<int>(count, static_cast<int>(mine.size()));
    for (int i = 0; i < take; ++i) {
      size_t j = static_cast<size_t>(i) +
                 static_cast<size_t>(rngs_.sixp.next_below(mine.size() -
                                                           static_cast<size_t>(i)));
      std::swap(mine[static_cast<size_t>(i)], mine[j]);
      int slot = mine[static_cast<size_t>(i)];
      t.candidates.push_back({slot, initiator.sched.at(slot)->channel_offset});
    }
    if (t.candidates.empty()) return kNoTxn;  // nothing left to remove
  }

  QueueEntry req;
  req.is_signaling = true;
  req.signaling_id = signaling_id(t.id, false);
  req.dest = peer;
  req.retries_left = cfg_.max_retries;
  req.enqueued_at = asn_;
  if (!enqueue_signaling(initiator, req))
    return kNoTxn;  // never registered; the caller may retry later

  uint32_t id = t.id;
  ++next_txn_;
  busy_pairs_.insert(pair_key(initiator.id, peer));
  txns_.emplace(id, std::move(t));
  ++report_.sixp_started;
  return id;
}

void Simulation::process_signaling_delivery(uint32_t sid, Node& receiver) {
  auto it = txns_.find(signaling_txn(sid));
  if (it == txns_.end()) return;  // concluded while the frame was in flight
  SixpTransaction& t = it->second;

  if (!signaling_is_response(sid)) {
    if (receiver.id != t.peer || t.state != SixpTransaction::State::ReqQueued)
      return;  // duplicate of an already-answered request
    if (t.cmd == SixpCmd::Clear) {
      apply_clear(t);
    } else if (t.cmd == SixpCmd::Add) {
      for (const CellRef& c : t.candidates) {
        if (static_cast<int>(t.grant.size()) >= t.cell_count) break;
        if (receiver.sched.slot_free(c.slot)) t.grant.push_back(c);
      }
    } else {
      for (const CellRef& c : t.candidates) {
        if (static_cast<int>(t.grant.size()) >= t.cell_count) break;
        const auto& cell = receiver.sched.at(c.slot);
        if (cell && cell->peer == t.initiator) t.grant.push_back(c);
      }
    }
    t.state = SixpTransaction::State::RespQueued;
    QueueEntry resp;
    resp.is_signaling = true;
    resp.signaling_id = signaling_id(t.id, true);
    resp.dest = t.initiator;
    resp.retries_left = cfg_.max_retries;
    resp.enqueued_at = asn_;
    if (!enqueue_signaling(receiver, resp)) {
      // the initiator will time out and retry through a later housekeeping
    }
    return;
  }

  if (receiver.id != t.initiator ||
      t.state != SixpTransaction::State::RespQueued)
    return;
  if (t.cmd == SixpCmd::Add)
    apply_add(t);
  else if (t.cmd == SixpCmd::Delete)
    apply_delete(t);
  conclude_txn(t, true);  // t is gone after this
}

void Simulation::apply_add(SixpTransaction& t) {
  Node& ini = nd(t.initiator);
  Node& peer = nd(t.peer);
  CellDir di = t.dir == SixpDir::InitiatorTx ? CellDir::Tx : CellDir::Rx;
  CellDir dp = di == CellDir::Tx ? CellDir::Rx : CellDir::Tx;
  for (const CellRef& g : t.grant) {
    if (t.cells_applied >= t.cell_count) break;
    // both sides revalidate: a slot claimed since the grant is skipped
    if (!ini.sched.slot_free(g.slot) || !peer.sched.slot_free(g.slot))
      continue;
    ini.sched.install(g.slot, {t.peer, di, g.channel_offset});
    peer.sched.install(g.slot, {t.initiator, dp, g.channel_offset});
    ++t.cells_applied;
  }
}

void Simulation::apply_delete(SixpTransaction& t) {
  Node& ini = nd(t.initiator);
  Node& peer = nd(t.peer);
  for (const CellRef& g : t.grant) {
    const auto& a = ini.sched.at(g.slot);
    const auto& b = peer.sched.at(g.slot);
    if (a && a->peer == t.peer && b && b->peer == t.initiator) {
      ini.sched.remove(g.slot);
      peer.sched.remove(g.slot);
      ++t.cells_applied;
    }
  }
}

void Simulation::apply_clear(SixpTransaction& t) {
  Node& ini = nd(t.initiator);
  Node& peer = nd(t.peer);
  for (int s = 1; s < ini.sched.length(); ++s) {
    const auto& a = ini.sched.at(s);
    if (a && a->peer == t.peer) {
      ini.sched.remove(s);
      ++t.cells_applied;
    }
    const auto& b = peer.sched.at(s);
    if (b && b->peer == t.initiator) peer.sched.remove(s);
  }
}

void Simulation::conclude_txn(SixpTransaction& t, bool completed) {
  t.state = completed ? SixpTransaction::State::Done
                      : SixpTransaction::State::Failed;
  if (completed) ++report_.sixp_completed;
  purge_signaling(nd(t.initiator), t.id);
  purge_signaling(nd(t.peer), t.id);
  busy_pairs_.erase(pair_key(t.initiator, t.peer));
  note_txn_outcome_for_migrations(t);
  txns_.erase(t.id);
}

void Simulation::purge_signaling(Node& n, uint32_t txn_id) {
  auto& q = n.queue.raw();
  for (auto it = q.begin(); it != q.end();) {
    if (it->is_signaling && signaling_txn(it->signaling_id) == txn_id) {
      ++stats(n.id).purged_signaling;
      it = q.erase(it);
    } else {
      ++it;
    }
  }
}

void Simulation::note_txn_outcome_for_migrations(const SixpTransaction& t) {
  Node& n = nd(t.initiator);
  if (t.purpose == SixpPurpose::MigrationAdd) {
    for (Migration& m : n.migrations) {
      if (m.add_txn == t.id) {
        m.add_done = true;
        break;
      }
    }
  } else if (t.purpose == SixpPurpose::MigrationClear) {
    if (!n.migrations.empty() && n.migrations.front().clear_txn == t.id)
      n.migrations.pop_front();
  }
}

void Simulation::txn_timeout_sweep() {
  const Asn limit = static_cast<Asn>(cfg_.sixp_timeout_frames) *
                    static_cast<Asn>(cfg_.slotframe_length);
  std::vector<uint32_t> dead;
  for (auto& [id, t] : txns_) {
    // Strict comparison: the sweep runs before the frame's slots, and a
    // response that lands exactly two slotframes after issuance still counts.
    if ((t.state == SixpTransaction::State::ReqQueued ||
         t.state == SixpTransaction::State::RespQueued) &&
        asn_ > t.issued_at + limit)
      dead.push_back(id);
  }
  for (uint32_t id : dead) {
    SixpTransaction& t = txns_.at(id);
    t.state = SixpTransaction::State::Failed;
    if (t.cmd == SixpCmd::Clear) {
      // the initiator wipes its half regardless; the mirror audit reclaims
      // whatever the peer still holds
      Node& ini = nd(t.initiator);
      for (int s = 1; s < ini.sched.length(); ++s) {
        const auto& c = ini.sched.at(s);
        if (c && c->peer == t.peer) ini.sched.remove(s);
      }
    }
    purge_signaling(nd(t.initiator), id);
    purge_signaling(nd(t.peer), id);
    busy_pairs_.erase(pair_key(t.initiator, t.peer));
    ++report_.sixp_timeouts;
    note_txn_outcome_for_migrations(t);
    txns_.erase(id);
  }
}

void Simulation::orphan_cell_audit() {
  for (Node& n : nodes_) {
    for (int s = 1; s < n.sched.length(); ++s) {
      const auto& c = n.sched.at(s);
      if (!c) continue;
      const auto& m = nd(c->peer).sched.at(s);
      bool healthy = m && m->peer == n.id && m->dir != c->dir &&
                     m->channel_offset == c->channel_offset;
      auto key = std::make_pair(n.id, s);
      if (healthy) {
        orphan_strikes_.erase(key);
        continue;
      }
      // two consecutive bad audits reclaim the slot; one may be a transient
      if (++orphan_strikes_[key] >= 2) {
        n.sched.remove(s);
        orphan_strikes_.erase(key);
      }
    }
  }
}

void Simulation::run_migrations(Node& n) {
  if (n.migrations.empty()) return;
  Migration& m = n.migrations.front();

  if (!m.add_issued) {
    if (pair_busy(n.id, m.to)) return;
    uint32_t id = issue_txn(n, m.to, SixpCmd::Add, m.cells,
                            SixpDir::InitiatorTx, SixpPurpose::MigrationAdd);
    if (id != kNoTxn) {
      m.add_issued = true;
      m.add_txn = id;
    }
    return;
  }
  if (!m.add_done || m.clear_issued) return;

  // the old pair survives while still serving the node's other role
  if (m.from == kNoNode || m.from == n.pp || m.from == n.ap) {
    n.migrations.pop_front();
    return;
  }
  Node& old_peer = nd(m.from);
  bool pair_empty = n.sched.count_toward(m.from, CellDir::Tx) == 0 &&
                    n.sched.count_toward(m.from, CellDir::Rx) == 0 &&
                    old_peer.sched.count_toward(n.id, CellDir::Tx) == 0 &&
                    old_peer.sched.count_toward(n.id, CellDir::Rx) == 0;
  if (pair_empty) {
    n.migrations.pop_front();
    return;
  }
  if (pair_busy(n.id, m.from)) return;
  uint32_t id = issue_txn(n, m.from, SixpCmd::Clear, 0, SixpDir::InitiatorTx,
                          SixpPurpose::MigrationClear);
  if (id != kNoTxn) {
    m.clear_issued = true;
    m.clear_txn = id;
  }
}

void Simulation::run_pending_clears(Node& n) {
  for (auto it = n.pending_clear.begin(); it != n.pending_clear.end();) {
    NodeId peer = *it;
    if (peer == n.pp || peer == n.ap) {
      it = n.pending_clear.erase(it);  // back in use, keep the cells
      continue;
    }
    Node& p = nd(peer);
    bool pair_empty = n.sched.count_toward(peer, CellDir::Tx) == 0 &&
                      n.sched.count_toward(peer, CellDir::Rx) == 0 &&
                      p.sched.count_toward(n.id, CellDir::Tx) == 0 &&
                      p.sched.count_toward(n.id, CellDir::Rx) == 0;
    if (pair_empty) {
      it = n.pending_clear.erase(it);
      continue;
    }
    if (!pair_busy(n.id, peer)) {
      uint32_t id = issue_txn(n, peer, SixpCmd::Clear, 0, SixpDir::InitiatorTx,
                              SixpPurpose::MigrationClear);
      if (id != kNoTxn) {
        it = n.pending_clear.erase(it);
        continue;
      }
    }
    ++it;
  }
}

void Simulation::zero_cell_repair(Node& n) {
  if (n.id == kRoot) return;
  auto repair = [&](NodeId peer) {
    if (peer == kNoNode) return;
    if (n.sched.count_toward(peer, CellDir::Tx) > 0) return;
    if (pair_busy(n.id, peer)) return;
    if (n.pending_clear.count(peer)) return;
    for (const Migration& m : n.migrations)
      if (m.to == peer || m.from == peer) return;  // already being handled
    issue_txn(n, peer, SixpCmd::Add, 1, SixpDir::InitiatorTx,
              SixpPurpose::Repair);
  };
  repair(n.pp);
  if (flooding_on()) repair(n.ap);
}

// ---------------------------------------------------- scheduling functions ---

void Simulation::msf_tick(Node& n, NodeId parent, bool used) {
  CellAction a = msf_on_cell_elapsed(n.msf[parent], used,
                                     n.sched.count_toward(parent, CellDir::Tx));
  if (a == CellAction::Add)
    issue_txn(n, parent, SixpCmd::Add, 1, SixpDir::InitiatorTx,
              SixpPurpose::UtilizationAdd);
  else if (a == CellAction::Delete)
    issue_txn(n, parent, SixpCmd::Delete, 1, SixpDir::InitiatorTx,
              SixpPurpose::UtilizationDelete);
  // a rejected issue is fine: the window just reset, the next one re-decides
}

void Simulation::bdpc_on_arrival(Node& parent, NodeId child,
                                 const Packet& pkt) {
  double elapsed_ms =
      static_cast<double>(asn_ - pkt.created_at) * cfg_.timeslot_ms;
  double budget_ms =
      bdpc_budget_ms(cfg_.budget_rule, cfg_.max_delay_ms, pkt.origin_rank,
                     parent.rank, cfg_.rank_base_step);

  auto [it, inserted] =
      parent.deadline.try_emplace(child, cfg_.bdpc_window);
  (void)inserted;
  BdpcChildState& st = it->second;
  st.window.push(bdpc_late(elapsed_ms, budget_ms));

  if (asn_ < st.cooldown_until) return;
  CellAction a =
      bdpc_evaluate(st.window, cfg_.bdpc_min_verdicts, cfg_.sf_max,
                    cfg_.sf_min, parent.sched.count_toward(child, CellDir::Rx));
  if (a == CellAction::None) return;
  uint32_t id =
      a == CellAction::Add
          ? issue_txn(parent, child, SixpCmd::Add, cfg_.prehop_add_cells,
                      SixpDir::InitiatorRx, SixpPurpose::DeadlineAdd)
          : issue_txn(parent, child, SixpCmd::Delete, 1, SixpDir::InitiatorRx,
                      SixpPurpose::DeadlineDelete);
  if (id != kNoTxn) {
    st.cooldown_until = asn_ + static_cast<Asn>(cfg_.bdpc_cooldown_frames) *
                                   static_cast<Asn>(cfg_.slotframe_length);
  }
}

// -------------------------------------------------------------- finalize ---

void Simulation::finalize() {
  if (finalized_) return;
  finalized_ = true;

  // Charge and lifetime are taken over the measurement window, so the
  // reported burn rate is the steady-state one rather than an average
  // diluted by the formation transient.
  const double measured_seconds =
      cfg_.sim_seconds() * static_cast<double>(horizon_ - measure_from_) /
      static_cast<double>(horizon_);
  bool found = false;
  bool all_infinite = true;
  double min_years = 0.0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    NodeStats& st = report_.nodes[i];
    st.still_queued = static_cast<uint64_t>(nodes_[i].queue.size());
    st.charge_c = st.energy.charge_c(cfg_.charge) - charge_base_[i];
    st.lifetime =
        lifetime_years(st.charge_c, measured_seconds, cfg_.charge.battery_c);
    if (nodes_[i].id == kRoot) continue;  // the sink is mains-powered
    if (st.lifetime.infinite) continue;
    all_infinite = false;
    if (!found || st.lifetime.years < min_years) {
      min_years = st.lifetime.years;
      found = true;
    }
  }
  report_.network_lifetime =
      found ? Lifetime{min_years, false} : Lifetime{0.0, all_infinite};
  report_.sim_seconds = cfg_.sim_seconds();
  report_.ledger = ledger_.finalize();
  report_.finalize_rates();
}

}  // namespace sixsim
