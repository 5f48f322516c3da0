#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "sixsim/metrics.hpp"

using namespace sixsim;

TEST_CASE("ecdf: one point per distinct value, cumulative fractions") {
  auto curve = ecdf({40.0, 10.0, 20.0, 20.0});
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].x == doctest::Approx(10.0));
  CHECK(curve[0].p == doctest::Approx(0.25));
  CHECK(curve[1].x == doctest::Approx(20.0));
  CHECK(curve[1].p == doctest::Approx(0.75));
  CHECK(curve[2].x == doctest::Approx(40.0));
  CHECK(curve[2].p == doctest::Approx(1.0));

  CHECK(ecdf({}).empty());
}

TEST_CASE("ecdf_at: fraction at or below, boundaries inclusive") {
  std::vector<double> s{10.0, 20.0, 20.0, 40.0};
  CHECK(ecdf_at(s, 9.99) == doctest::Approx(0.0));
  CHECK(ecdf_at(s, 10.0) == doctest::Approx(0.25));
  CHECK(ecdf_at(s, 20.0) == doctest::Approx(0.75));
  CHECK(ecdf_at(s, 39.0) == doctest::Approx(0.75));
  CHECK(ecdf_at(s, 40.0) == doctest::Approx(1.0));
  CHECK(ecdf_at(s, 1e9) == doctest::Approx(1.0));
  CHECK(ecdf_at({}, 5.0) == doctest::Approx(0.0));
}

TEST_CASE("delivery recording: the deadline is inclusive") {
  RunReport r;
  r.n_tx = 3;
  r.record_delivery(1500.0, 1500.0);  // exactly on time
  r.record_delivery(1500.1, 1500.0);  // late
  r.record_delivery(2.0, 1500.0);
  r.finalize_rates();
  CHECK(r.n_rx == 3);
  CHECK(r.n_delayed == 1);
  CHECK(r.pdr_e2e == doctest::Approx(1.0));
  CHECK(r.on_time == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("rate guards: no deliveries, no divisions") {
  RunReport r;
  r.finalize_rates();
  CHECK_FALSE(r.pdr_defined);
  CHECK(r.on_time == doctest::Approx(0.0));
}

TEST_CASE("ledger: delivery, loss attribution, in-flight") {
  PacketLedger led;

  // packet A: two copies, one delivered, the other still lives at horizon
  FlowKey a{1, 0};
  led.on_generated(a);
  led.on_instance_live(a);
  led.on_instance_live(a);
  led.on_handoff(a);
  led.on_instance_live(a);
  led.on_sink_consumed(a, true);

  // packet B: single copy dies of retry exhaustion
  FlowKey b{2, 0};
  led.on_generated(b);
  led.on_instance_live(b);
  led.on_instance_dead(b, LossCause::RetryExhaust);

  // packet C: copy never fit any queue
  FlowKey c{3, 0};
  led.on_generated(c);
  led.on_copy_suppressed(c, LossCause::QueueReject);

  // packet D: alive at horizon, never delivered
  FlowKey d{4, 0};
  led.on_generated(d);
  led.on_instance_live(d);

  auto t = led.finalize();
  CHECK(t.generated == 4);
  CHECK(t.delivered == 1);
  CHECK(t.lost == 2);
  CHECK(t.in_flight == 1);
  CHECK(t.lost_by[static_cast<int>(LossCause::RetryExhaust)] == 1);
  CHECK(t.lost_by[static_cast<int>(LossCause::QueueReject)] == 1);
  CHECK(t.consistent);
  CHECK_FALSE(led.any_negative());
}

TEST_CASE("ledger: a delivered packet is counted once, duplicates never") {
  PacketLedger led;
  FlowKey a{1, 5};
  led.on_generated(a);
  led.on_instance_live(a);
  led.on_instance_live(a);
  led.on_sink_consumed(a, true);
  led.on_sink_consumed(a, false);  // duplicate arrival
  auto t = led.finalize();
  CHECK(t.generated == 1);
  CHECK(t.delivered == 1);
  CHECK(t.lost == 0);
  CHECK(t.in_flight == 0);
  CHECK(t.consistent);
}

TEST_CASE("ledger: a delivered packet's dying copies are not losses") {
  PacketLedger led;
  FlowKey a{1, 6};
  led.on_generated(a);
  led.on_instance_live(a);
  led.on_instance_live(a);
  led.on_sink_consumed(a, true);
  led.on_instance_dead(a, LossCause::RetryExhaust);  // the other copy
  auto t = led.finalize();
  CHECK(t.delivered == 1);
  CHECK(t.lost == 0);
  CHECK(t.in_flight == 0);
  CHECK(t.consistent);
}

TEST_CASE("ledger: events for unknown packets pass through silently") {
  // The ledger audits exactly the packets it saw born; copies of anything
  // else (traffic outside the measurement window) must not perturb it.
  PacketLedger led;
  FlowKey known{1, 0};
  led.on_generated(known);
  led.on_instance_live(known);
  led.on_sink_consumed(known, true);

  FlowKey stranger{9, 9};
  led.on_instance_live(stranger);
  led.on_handoff(stranger);
  led.on_instance_dead(stranger, LossCause::RetryExhaust);
  led.on_copy_suppressed(stranger, LossCause::NoParent);
  led.on_sink_consumed(stranger, true);

  auto t = led.finalize();
  CHECK(t.generated == 1);
  CHECK(t.delivered == 1);
  CHECK(t.lost == 0);
  CHECK(t.consistent);
  CHECK_FALSE(led.any_negative());
}

namespace {

RunReport mk_run(const std::string& arm, double period, double on_time,
                 double pdr, double life) {
  RunReport r;
  r.arm = arm;
  r.pk_period_s = period;
  r.n_tx = 1000;
  r.n_rx = static_cast<uint64_t>(pdr * 1000);
  r.n_delayed = static_cast<uint64_t>((1.0 - on_time) * r.n_rx + 0.5);
  r.finalize_rates();
  r.network_lifetime.years = life;
  return r;
}

}  // namespace

TEST_CASE("aggregation: arm means over runs, grouped and period-split") {
  std::vector<RunReport> runs;
  runs.push_back(mk_run("A", 5.0, 0.90, 1.0, 1.0));
  runs.push_back(mk_run("A", 15.0, 0.80, 1.0, 3.0));
  runs.push_back(mk_run("B", 5.0, 0.50, 1.0, 2.0));

  auto by_arm = aggregate_by_arm(runs);
  REQUIRE(by_arm.size() == 2);
  CHECK(by_arm[0].arm == "A");
  CHECK(by_arm[0].runs == 2);
  CHECK(by_arm[0].lifetime_years == doctest::Approx(2.0));
  CHECK(by_arm[0].on_time == doctest::Approx(0.85).epsilon(1e-3));
  CHECK(by_arm[1].arm == "B");
  CHECK(by_arm[1].runs == 1);

  auto split = aggregate_by_arm_period(runs);
  REQUIRE(split.size() == 3);
  CHECK(split[0].arm == "A");
  CHECK(split[0].pk_period_s == doctest::Approx(5.0));
  CHECK(split[0].runs == 1);
  CHECK(split[0].on_time == doctest::Approx(0.90).epsilon(1e-3));
}

TEST_CASE("head-to-head ratios divide subject by reference") {
  std::vector<ArmAverages> avg(2);
  avg[0].arm = "subject";
  avg[0].on_time = 1.0220;
  avg[0].lifetime_years = 0.7348;
  avg[1].arm = "reference";
  avg[1].on_time = 0.5;
  avg[1].lifetime_years = 0.5;

  auto rows = ratio_rows(avg, "subject", {"reference"});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].comparison == "subject vs reference");
  CHECK(rows[0].on_time_ratio == doctest::Approx(2.0440));
  CHECK(rows[0].lifetime_ratio == doctest::Approx(1.4696));

  // unknown names yield no rows rather than junk
  CHECK(ratio_rows(avg, "nobody", {"reference"}).empty());
  CHECK(ratio_rows(avg, "subject", {"nobody"}).empty());
}

TEST_CASE("csv: header names the run-row columns") {
  CHECK(runs_csv_header() ==
        "arm,seed,pk_period,n_tx,n_rx,n_delayed,pdr_e2e,on_time,"
        "lifetime_years,duplicates,queue_drops,retry_drops,no_parent_drops\n");
}

TEST_CASE("csv: fixed-notation rows are byte-stable") {
  RunReport r = mk_run("leafCopy+BDPC", 5.0, 0.95, 0.998, 0.0);
  r.seed = 3;
  r.network_lifetime.years = 0.123456789;
  std::string row1 = runs_csv_row(r);
  std::string row2 = runs_csv_row(r);
  CHECK(row1 == row2);
  CHECK(row1.substr(0, 16) == "leafCopy+BDPC,3,");
  CHECK(row1.find("0.123457") != std::string::npos);  // six decimals, rounded
  CHECK(row1.back() == '\n');

  // a run with no traffic writes nan for the undefined rate, inf for the
  // untouched battery
  RunReport idle;
  idle.arm = "x";
  idle.finalize_rates();
  idle.network_lifetime.infinite = true;
  std::string row = runs_csv_row(idle);
  CHECK(row.find("nan") != std::string::npos);
  CHECK(row.find("inf") != std::string::npos);
}

TEST_CASE("csv: summary tables carry one line per group plus header") {
  std::vector<RunReport> runs;
  runs.push_back(mk_run("A", 5.0, 0.9, 1.0, 1.0));
  runs.push_back(mk_run("B", 5.0, 0.5, 1.0, 2.0));
  auto by_arm = aggregate_by_arm(runs);

  std::string summary = summary_csv(by_arm);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
  CHECK(summary.find("arm,runs,lifetime_years,pdr_e2e,on_time\n") == 0);

  std::string by_period = summary_by_period_csv(aggregate_by_arm_period(runs));
  CHECK(std::count(by_period.begin(), by_period.end(), '\n') == 3);

  auto rows = ratio_rows(by_arm, "A", {"B"});
  std::string ratios = ratios_csv(rows);
  CHECK(std::count(ratios.begin(), ratios.end(), '\n') == 2);
  CHECK(ratios.find("A vs B") != std::string::npos);
}
