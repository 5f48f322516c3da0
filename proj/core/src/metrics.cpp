#include "sixsim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace sixsim {

const char* to_string(LossCause c) {
  switch (c) {
    case LossCause::RetryExhaust: return "retry_exhaust";
    case LossCause::QueueReject: return "queue_reject";
    case LossCause::NoParent: return "no_parent";
    case LossCause::Discard: return "discard";
    case LossCause::kCount: break;
  }
  return "?";
}

void PacketLedger::on_generated(FlowKey f) {
  at(f);  // materialize the slot; counters derive from map contents
}

// Every event after generation tolerates an unknown flow: the ledger audits
// exactly the packets it saw born, so copies of untracked packets (for
// example traffic outside the measurement window) pass through silently.
PacketLedger::State* PacketLedger::find(FlowKey f) {
  auto it = map_.find(f.packed());
  return it == map_.end() ? nullptr : &it->second;
}

void PacketLedger::on_instance_live(FlowKey f) {
  if (State* s = find(f)) ++s->live;
}

void PacketLedger::on_handoff(FlowKey f) {
  State* s = find(f);
  if (!s) return;
  if (--s->live < 0) negative_ = true;
}

void PacketLedger::on_instance_dead(FlowKey f, LossCause cause) {
  State* s = find(f);
  if (!s) return;
  if (--s->live < 0) negative_ = true;
  s->last_cause = static_cast<uint8_t>(cause);
  s->cause_set = true;
}

void PacketLedger::on_copy_suppressed(FlowKey f, LossCause cause) {
  State* s = find(f);
  if (!s) return;
  s->last_cause = static_cast<uint8_t>(cause);
  s->cause_set = true;
}

void PacketLedger::on_sink_consumed(FlowKey f, bool counted_as_delivery) {
  State* s = find(f);
  if (!s) return;
  if (counted_as_delivery) s->delivered = true;
}

PacketLedger::Totals PacketLedger::finalize() const {
  Totals t;
  t.generated = map_.size();
  for (const auto& [key, s] : map_) {
    (void)key;
    if (s.delivered) {
      ++t.delivered;
    } else if (s.live > 0) {
      ++t.in_flight;
    } else {
      ++t.lost;
      // A lost packet always had at least one terminal event; attribute the
      // most recent one. The fallback covers a copy that vanished with its
      // whole path (should not happen; keeps the sum exact regardless).
      ++t.lost_by[s.cause_set ? s.last_cause
                              : static_cast<uint8_t>(LossCause::RetryExhaust)];
    }
  }
  t.consistent =
      !negative_ && t.generated == t.delivered + t.lost + t.in_flight;
  return t;
}

std::vector<EcdfPoint> ecdf(std::vector<double> samples) {
  std::vector<EcdfPoint> out;
  if (samples.empty()) return out;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.push_back({samples[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

double ecdf_at(const std::vector<double>& samples, double x) {
  if (samples.empty()) return 0.0;
  size_t n = 0;
  for (double v : samples)
    if (v <= x) ++n;
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

std::vector<ArmAverages> aggregate_by_arm(const std::vector<RunReport>& runs) {
  // Keyed by first appearance so the output follows the plan's arm order.
  std::vector<ArmAverages> out;
  auto find = [&out](const std::string& arm) -> ArmAverages& {
    for (auto& a : out)
      if (a.arm == arm) return a;
    out.push_back({arm, 0, 0.0, 0.0, 0.0});
    return out.back();
  };
  for (const RunReport& r : runs) {
    ArmAverages& a = find(r.arm);
    ++a.runs;
    a.lifetime_years += r.network_lifetime.years;
    a.pdr_e2e += r.pdr_e2e;
    a.on_time += r.on_time;
  }
  for (auto& a : out) {
    if (a.runs == 0) continue;
    a.lifetime_years /= a.runs;
    a.pdr_e2e /= a.runs;
    a.on_time /= a.runs;
  }
  return out;
}

std::vector<ArmPeriodAverages> aggregate_by_arm_period(
    const std::vector<RunReport>& runs) {
  std::vector<ArmPeriodAverages> out;
  auto find = [&out](const std::string& arm, double p) -> ArmPeriodAverages& {
    for (auto& a : out)
      if (a.arm == arm && a.pk_period_s == p) return a;
    out.push_back({arm, p, 0, 0.0, 0.0, 0.0});
    return out.back();
  };
  for (const RunReport& r : runs) {
    ArmPeriodAverages& a = find(r.arm, r.pk_period_s);
    ++a.runs;
    a.lifetime_years += r.network_lifetime.years;
    a.pdr_e2e += r.pdr_e2e;
    a.on_time += r.on_time;
  }
  for (auto& a : out) {
    if (a.runs == 0) continue;
    a.lifetime_years /= a.runs;
    a.pdr_e2e /= a.runs;
    a.on_time /= a.runs;
  }
  return out;
}

std::vector<RatioRow> ratio_rows(const std::vector<ArmAverages>& avg,
                                 const std::string& subject,
                                 const std::vector<std::string>& references) {
  const ArmAverages* subj = nullptr;
  for (const auto& a : avg)
    if (a.arm == subject) subj = &a;
  std::vector<RatioRow> rows;
  if (!subj) return rows;
  for (const std::string& ref : references) {
    for (const auto& a : avg) {
      if (a.arm != ref) continue;
      RatioRow r;
      r.comparison = subject + " vs " + ref;
      r.lifetime_ratio = a.lifetime_years > 0.0 ? subj->lifetime_years / a.lifetime_years : 0.0;
      r.on_time_ratio = a.on_time > 0.0 ? subj->on_time / a.on_time : 0.0;
      rows.push_back(r);
    }
  }
  return rows;
}

namespace {
std::string f6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
}  // namespace

std::string runs_csv_header() {
  return "arm,seed,pk_period,n_tx,n_rx,n_delayed,pdr_e2e,on_time,"
         "lifetime_years,duplicates,queue_drops,retry_drops,no_parent_drops\n";
}

std::string runs_csv_row(const RunReport& r) {
  std::string out;
  out += r.arm;
  out += "," + std::to_string(r.seed);
  out += "," + f6(r.pk_period_s);
  out += "," + std::to_string(r.n_tx);
  out += "," + std::to_string(r.n_rx);
  out += "," + std::to_string(r.n_delayed);
  out += "," + (r.pdr_defined ? f6(r.pdr_e2e) : std::string("nan"));
  out += "," + f6(r.on_time);
  out += "," + (r.network_lifetime.infinite ? std::string("inf") : f6(r.network_lifetime.years));
  out += "," + std::to_string(r.duplicates);
  out += "," + std::to_string(r.queue_drops);
  out += "," + std::to_string(r.retry_drops);
  out += "," + std::to_string(r.no_parent_drops);
  out += "\n";
  return out;
}

std::string summary_csv(const std::vector<ArmAverages>& avg) {
  std::string out = "arm,runs,lifetime_years,pdr_e2e,on_time\n";
  for (const auto& a : avg) {
    out += a.arm;
    out += "," + std::to_string(a.runs);
    out += "," + f6(a.lifetime_years);
    out += "," + f6(a.pdr_e2e);
    out += "," + f6(a.on_time);
    out += "\n";
  }
  return out;
}

std::string summary_by_period_csv(const std::vector<ArmPeriodAverages>& avg) {
  std::string out = "arm,pk_period,runs,lifetime_years,pdr_e2e,on_time\n";
  for (const auto& a : avg) {
    out += a.arm;
    out += "," + f6(a.pk_period_s);
    out += "," + std::to_string(a.runs);
    out += "," + f6(a.lifetime_years);
    out += "," + f6(a.pdr_e2e);
    out += "," + f6(a.on_time);
    out += "\n";
  }
  return out;
}

std::string ratios_csv(const std::vector<RatioRow>& rows) {
  std::string out = "comparison,lifetime_ratio,on_time_ratio\n";
  for (const auto& r : rows) {
    out += r.comparison;
    out += "," + f6(r.lifetime_ratio);
    out += "," + f6(r.on_time_ratio);
    out += "\n";
  }
  return out;
}

std::string nodes_csv(const RunReport& r, const ChargeConfig& charge) {
  (void)charge;
  std::string out =
      "node,slots_sleep,slots_rx_idle,slots_tx_data_rx_ack,slots_tx_data_only,"
      "slots_rx_data_tx_ack,slots_rx_data_only,charge_c,lifetime_years,"
      "generated,forwarded\n";
  for (size_t n = 0; n < r.nodes.size(); ++n) {
    const NodeStats& s = r.nodes[n];
    out += std::to_string(n);
    for (int i = 0; i < kSlotOutcomes; ++i)
      out += "," + std::to_string(s.energy.slots[i]);
    out += "," + f6(s.charge_c);
    out += "," + (s.lifetime.infinite ? std::string("inf") : f6(s.lifetime.years));
    out += "," + std::to_string(s.generated);
    out += "," + std::to_string(s.forwarded);
    out += "\n";
  }
  return out;
}

}  // namespace sixsim
