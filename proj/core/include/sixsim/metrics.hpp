#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sixsim/energy.hpp"
#include "sixsim/packet.hpp"

namespace sixsim {

// Why a packet instance (a queue-resident copy) ceased to exist without
// being handed to the next hop.
enum class LossCause : uint8_t {
  RetryExhaust = 0,  // every transmission attempt failed
  QueueReject,       // next hop's queue was full at enqueue time
  NoParent,          // no eligible next hop at forwarding time
  Discard,           // router dropped an already-seen copy on purpose
  kCount
};

constexpr int kLossCauses = static_cast<int>(LossCause::kCount);
const char* to_string(LossCause c);

// Exact per-packet bookkeeping. A packet is one (source, sequence); its
// instances are the copies sitting in queues anywhere in the network. The
// run-end audit requires: every generated packet is delivered, lost with an
// attributed cause, or still in flight — with no double counting.
class PacketLedger {
 public:
  void on_generated(FlowKey f);
  // A copy entered some queue.
  void on_instance_live(FlowKey f);
  // The sender's copy left its queue after a confirmed handoff.
  void on_handoff(FlowKey f);
  // A copy died (never handed over). The cause is remembered so that a
  // packet whose last instance dies can be attributed.
  void on_instance_dead(FlowKey f, LossCause cause);
  // A would-be copy never entered a queue (rejected, unroutable, or
  // deliberately not re-forwarded). Only records the cause.
  void on_copy_suppressed(FlowKey f, LossCause cause);
  // A copy was consumed at the sink (first delivery or duplicate).
  void on_sink_consumed(FlowKey f, bool counted_as_delivery);

  struct Totals {
    uint64_t generated = 0;
    uint64_t delivered = 0;
    uint64_t lost = 0;
    uint64_t in_flight = 0;  // undelivered with live instances at horizon
    uint64_t lost_by[kLossCauses] = {};
    bool consistent = false;  // generated == delivered + lost + in_flight
  };
  Totals finalize() const;

  // Live-instance count audit hook (negative counts mean a bookkeeping bug).
  bool any_negative() const { return negative_; }

 private:
  struct State {
    int32_t live = 0;
    bool delivered = false;
    uint8_t last_cause = 0;
    bool cause_set = false;
  };
  std::unordered_map<uint64_t, State> map_;
  bool negative_ = false;

  State& at(FlowKey f) { return map_[f.packed()]; }
  State* find(FlowKey f);
};

// Per-node roll-up carried in the run report.
struct NodeStats {
  EnergyMeter energy;
  double charge_c = 0.0;
  Lifetime lifetime;
  uint32_t generated = 0;   // unique packets sourced here
  uint32_t forwarded = 0;   // copies handed to this node's queue by routers
  // queue conservation audit
  uint64_t enq_ok = 0;
  uint64_t enq_rejected = 0;
  uint64_t handed_off = 0;
  uint64_t retry_dropped = 0;
  uint64_t retargeted_away = 0;  // entries dropped by requeue on parent loss
  uint64_t purged_signaling = 0; // entries removed when their txn concluded
  uint64_t displaced = 0;        // data evicted when control frames claim a full queue
  uint64_t still_queued = 0;
};

// Everything measured in one run.
struct RunReport {
  std::string arm;
  uint64_t seed = 0;
  double pk_period_s = 0.0;

  uint64_t n_tx = 0;       // unique packets generated
  uint64_t n_rx = 0;       // unique packets first-delivered at the sink
  uint64_t n_delayed = 0;  // first deliveries past the deadline
  uint64_t duplicates = 0; // sink arrivals after the first copy

  uint64_t queue_drops = 0;      // copy-level enqueue rejections
  uint64_t retry_drops = 0;      // copy-level retry exhaustions
  uint64_t no_parent_drops = 0;  // copy-level next-hop-missing drops
  uint64_t discard_drops = 0;    // copy-level on-purpose duplicate discards

  PacketLedger::Totals ledger;

  bool pdr_defined = false;
  double pdr_e2e = 0.0;
  double on_time = 0.0;  // 1 - n_delayed / n_rx

  double sim_seconds = 0.0;
  Lifetime network_lifetime;  // min over battery-powered nodes

  std::vector<double> delays_ms;  // first-delivery delays, arrival order
  std::vector<NodeStats> nodes;

  // control-plane tallies
  uint64_t sixp_started = 0;
  uint64_t sixp_completed = 0;
  uint64_t sixp_timeouts = 0;
  uint64_t sixp_busy_rejects = 0;
  uint64_t parent_changes = 0;
  uint64_t ap_changes = 0;
  uint64_t dio_sent = 0;
  uint64_t dio_heard = 0;

  void record_delivery(double delay_ms, double deadline_ms) {
    ++n_rx;
    delays_ms.push_back(delay_ms);
    if (delay_ms > deadline_ms) ++n_delayed;  // exactly on time is on time
  }

  void finalize_rates() {
    pdr_defined = n_tx > 0;
    pdr_e2e = pdr_defined ? static_cast<double>(n_rx) / static_cast<double>(n_tx) : 0.0;
    on_time = n_rx > 0 ? 1.0 - static_cast<double>(n_delayed) / static_cast<double>(n_rx) : 0.0;
  }
};

// Empirical CDF of the samples: one point per distinct value, cumulative
// fraction at that value. Empty input yields an empty curve.
struct EcdfPoint {
  double x = 0.0;
  double p = 0.0;
};
std::vector<EcdfPoint> ecdf(std::vector<double> samples);

// Fraction of samples <= x (0 on empty input).
double ecdf_at(const std::vector<double>& samples, double x);

// Arm-level averages over all runs of that arm.
struct ArmAverages {
  std::string arm;
  int runs = 0;
  double lifetime_years = 0.0;
  double pdr_e2e = 0.0;
  double on_time = 0.0;
};
std::vector<ArmAverages> aggregate_by_arm(const std::vector<RunReport>& runs);

// Like aggregate_by_arm but partitioned by packet period too.
struct ArmPeriodAverages {
  std::string arm;
  double pk_period_s = 0.0;
  int runs = 0;
  double lifetime_years = 0.0;
  double pdr_e2e = 0.0;
  double on_time = 0.0;
};
std::vector<ArmPeriodAverages> aggregate_by_arm_period(
    const std::vector<RunReport>& runs);

// Head-to-head ratios of one subject arm against reference arms
// (subject / reference), on lifetime and on-time rate.
struct RatioRow {
  std::string comparison;  // "<subject> vs <reference>"
  double lifetime_ratio = 0.0;
  double on_time_ratio = 0.0;
};
std::vector<RatioRow> ratio_rows(const std::vector<ArmAverages>& avg,
                                 const std::string& subject,
                                 const std::vector<std::string>& references);

// --- CSV formatting (fixed 6-decimal notation so outputs are stable) ---
std::string runs_csv_header();
std::string runs_csv_row(const RunReport& r);
std::string summary_csv(const std::vector<ArmAverages>& avg);
std::string summary_by_period_csv(const std::vector<ArmPeriodAverages>& avg);
std::string ratios_csv(const std::vector<RatioRow>& rows);
std::string nodes_csv(const RunReport& r, const ChargeConfig& charge);

}  // namespace sixsim
