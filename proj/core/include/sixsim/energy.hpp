#pragma once

#include <array>
#include <cstdint>

#include "sixsim/config.hpp"

namespace sixsim {

// What a node's radio did during one slot. Exactly one outcome is recorded
// per node per slot.
enum class SlotOutcome : uint8_t {
  Sleep = 0,
  RxIdle,        // listened, no frame decodable
  TxDataRxAck,   // unicast sent, ack heard
  TxDataOnly,    // frame sent, no ack heard (broadcast or lost ack)
  RxDataTxAck,   // unicast received, ack answered
  RxDataOnly,    // broadcast (or overheard frame) received
  kCount
};

constexpr int kSlotOutcomes = static_cast<int>(SlotOutcome::kCount);

double charge_of(SlotOutcome o, const ChargeConfig& c);

// Per-node slot-outcome histogram; total charge is recomputed from it, so
// the histogram and the coulomb count can never disagree.
struct EnergyMeter {
  std::array<uint64_t, kSlotOutcomes> slots{};

  void add(SlotOutcome o) { ++slots[static_cast<int>(o)]; }

  uint64_t total_slots() const {
    uint64_t n = 0;
    for (uint64_t v : slots) n += v;
    return n;
  }

  // Total charge in coulombs.
  double charge_c(const ChargeConfig& c) const;
};

// Years until the battery is drained at the average current of the run.
// `infinite` is set (and the year count is 0) when no charge was spent.
struct Lifetime {
  double years = 0.0;
  bool infinite = false;
};

Lifetime lifetime_years(double charge_c, double sim_seconds,
                        double battery_c);

}  // namespace sixsim
