#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "sixsim/packet.hpp"
#include "sixsim/types.hpp"

namespace sixsim {

enum class CellDir : uint8_t { Tx, Rx };

// One negotiated link cell, stored at its slot offset. The shared
// advertisement cell is not stored here; it is implicitly [0, 0] for every
// node and handled by the per-frame shared-slot logic.
struct Cell {
  NodeId peer = kNoNode;
  CellDir dir = CellDir::Tx;
  int channel_offset = 0;
};

// Frequency actually used by a cell in a given slot (hopping).
inline int hop_channel(int channel_offset, Asn asn, int channels) {
  return static_cast<int>((channel_offset + asn) % channels);
}

// A node's slotframe: at most one cell per slot offset. Slot 0 is reserved
// for the shared cell and is never negotiable.
class Schedule {
 public:
  explicit Schedule(int slotframe_length = 0)
      : slots_(slotframe_length) {}

  int length() const { return static_cast<int>(slots_.size()); }

  const std::optional<Cell>& at(int slot) const { return slots_[slot]; }

  bool slot_free(int slot) const { return slot > 0 && !slots_[slot]; }

  // Returns false (and changes nothing) if the slot is taken or reserved.
  bool install(int slot, const Cell& c) {
    if (!slot_free(slot)) return false;
    slots_[slot] = c;
    return true;
  }

  void remove(int slot) { slots_[slot].reset(); }

  int count_toward(NodeId peer, CellDir dir) const {
    int n = 0;
    for (const auto& c : slots_)
      if (c && c->peer == peer && c->dir == dir) ++n;
    return n;
  }

  int negotiated_count() const {
    int n = 0;
    for (const auto& c : slots_)
      if (c) ++n;
    return n;
  }

  std::vector<int> free_slots() const {
    std::vector<int> out;
    for (int s = 1; s < length(); ++s)
      if (!slots_[s]) out.push_back(s);
    return out;
  }

  std::vector<int> slots_toward(NodeId peer, CellDir dir) const {
    std::vector<int> out;
    for (int s = 1; s < length(); ++s)
      if (slots_[s] && slots_[s]->peer == peer && slots_[s]->dir == dir)
        out.push_back(s);
    return out;
  }

 private:
  std::vector<std::optional<Cell>> slots_;
};

// Transmission queue entry: an application packet or a cell-negotiation
// frame. Negotiation frames go ahead of data but behind one another.
struct QueueEntry {
  bool is_signaling = false;
  uint32_t signaling_id = 0;  // frame id in the transaction table
  Packet pkt;                 // valid when !is_signaling
  NodeId dest = kNoNode;
  int retries_left = 0;
  Asn enqueued_at = 0;
};

class TxQueue {
 public:
  explicit TxQueue(int capacity = 0) : capacity_(capacity) {}

  int size() const { return static_cast<int>(entries_.size()); }
  bool full() const { return size() >= capacity_; }
  bool empty() const { return entries_.empty(); }

  // False when the queue is at capacity (the entry is rejected, never
  // stored). Signaling frames are inserted after the last signaling frame
  // already queued; data goes to the back.
  bool push(const QueueEntry& e) {
    if (full()) return false;
    if (e.is_signaling) {
      size_t at = 0;
      while (at < entries_.size() && entries_[at].is_signaling) ++at;
      entries_.insert(entries_.begin() + at, e);
    } else {
      entries_.push_back(e);
    }
    return true;
  }

  // Index of the first entry bound for `dest` that was enqueued before
  // `now` (a frame cannot leave in the very slot that queued it), or -1.
  int first_for(NodeId dest, Asn now) const {
    for (size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].dest == dest && entries_[i].enqueued_at < now)
        return static_cast<int>(i);
    return -1;
  }

  QueueEntry& operator[](int i) { return entries_[i]; }
  const QueueEntry& operator[](int i) const { return entries_[i]; }

  void erase(int i) { entries_.erase(entries_.begin() + i); }

  std::deque<QueueEntry>& raw() { return entries_; }
  const std::deque<QueueEntry>& raw() const { return entries_; }

 private:
  int capacity_ = 0;
  std::deque<QueueEntry> entries_;
};

}  // namespace sixsim
