#include <map>

#include "doctest.h"
#include "sixsim/sf_bdpc.hpp"
#include "sixsim/sf_msf.hpp"
#include "sixsim/types.hpp"

using namespace sixsim;

namespace {

// Pump one evaluation window through the counters: `used` of the cells see
// a transmission attempt, the rest idle. Returns the action produced by the
// final cell of the window.
CellAction pump_window(MsfCounters& c, int used, int cells_held) {
  CellAction last = CellAction::None;
  for (int i = 0; i < kMsfMaxNumCells + 1; ++i) {
    last = msf_on_cell_elapsed(c, i < used, cells_held);
    if (i < kMsfMaxNumCells) REQUIRE(last == CellAction::None);
  }
  return last;
}

}  // namespace

TEST_CASE("utilization manager: grow, shrink, and the silent band") {
  MsfCounters c;

  // 76 used of 101 elapsed is the lowest utilization that triggers growth
  CHECK(pump_window(c, 76, 1) == CellAction::Add);
  CHECK(pump_window(c, 75, 1) == CellAction::None);

  // 24 used of 101 elapsed is the highest utilization that triggers shrink
  CHECK(pump_window(c, 24, 2) == CellAction::Delete);
  CHECK(pump_window(c, 25, 2) == CellAction::None);

  // between the limits: silence
  CHECK(pump_window(c, 50, 2) == CellAction::None);

  // the counters reset after every completed window, decided or not, so a
  // hot window right after a silent one still evaluates independently
  CHECK(pump_window(c, 101, 1) == CellAction::Add);
  CHECK(c.nce == 0);
  CHECK(c.ncu == 0);
}

TEST_CASE("utilization manager: the last cell is never offered for deletion") {
  MsfCounters c;
  CHECK(pump_window(c, 0, 1) == CellAction::None);   // floor holds
  CHECK(pump_window(c, 0, 2) == CellAction::Delete); // above the floor
}

TEST_CASE("utilization manager: per-parent counters evaluate independently") {
  // Interleave traffic toward two parents the way a replicating node does:
  // the copy stream keeps parent A busy while parent B idles. Each pair of
  // counters must reach its own verdict at its own window boundary,
  // untouched by the other's traffic.
  std::map<NodeId, MsfCounters> per_parent;
  CellAction got_a = CellAction::None, got_b = CellAction::None;
  int fired_a = 0, fired_b = 0;
  for (int i = 0; i < kMsfMaxNumCells + 1; ++i) {
    CellAction a = msf_on_cell_elapsed(per_parent[1], true, 3);
    if (a != CellAction::None) {
      got_a = a;
      ++fired_a;
    }
    CellAction b = msf_on_cell_elapsed(per_parent[2], false, 3);
    if (b != CellAction::None) {
      got_b = b;
      ++fired_b;
    }
  }
  CHECK(fired_a == 1);
  CHECK(fired_b == 1);
  CHECK(got_a == CellAction::Add);
  CHECK(got_b == CellAction::Delete);
  // windows completed together because the cell streams were interleaved
  // one to one; neither counter pair saw the other's 101 cells
  CHECK(per_parent[1].nce == 0);
  CHECK(per_parent[2].nce == 0);
}

TEST_CASE("verdict window: ring arithmetic") {
  BdpcWindow w(5);
  CHECK(w.count() == 0);
  CHECK(w.late_rate() == doctest::Approx(0.0));

  for (int i = 0; i < 3; ++i) w.push(true);
  CHECK(w.count() == 3);
  CHECK(w.late_count() == 3);
  CHECK(w.late_rate() == doctest::Approx(1.0));

  w.push(false);
  w.push(false);
  CHECK(w.count() == 5);
  CHECK(w.late_rate() == doctest::Approx(0.6));

  // two more on-time verdicts evict two of the late ones
  w.push(false);
  w.push(false);
  CHECK(w.count() == 5);
  CHECK(w.late_count() == 1);
  CHECK(w.late_rate() == doctest::Approx(0.2));

  w.reset();
  CHECK(w.count() == 0);
  CHECK(w.late_count() == 0);
}

TEST_CASE("lateness is strict: exactly on budget is on time") {
  CHECK_FALSE(bdpc_late(1500.0, 1500.0));
  CHECK(bdpc_late(1500.0001, 1500.0));
  CHECK_FALSE(bdpc_late(0.0, 1500.0));
}

TEST_CASE("delay budget: end-to-end grants the full deadline everywhere") {
  CHECK(bdpc_budget_ms(BudgetRule::EndToEnd, 1500.0, 1024, 512, 256) ==
        doctest::Approx(1500.0));
}

TEST_CASE("delay budget: proportional scales with rank progress") {
  // halfway down (plus the closing step) earns three quarters of the budget
  CHECK(bdpc_budget_ms(BudgetRule::Proportional, 1500.0, 1024, 512, 256) ==
        doctest::Approx(1125.0));
  // at the root (rank equals the base step) the fraction closes to one
  CHECK(bdpc_budget_ms(BudgetRule::Proportional, 1500.0, 1024, 256, 256) ==
        doctest::Approx(1500.0));
  // right below the source, one step of progress
  CHECK(bdpc_budget_ms(BudgetRule::Proportional, 1500.0, 1024, 1024, 256) ==
        doctest::Approx(1500.0 * 256.0 / 1024.0));
  // degenerate origins get the full deadline rather than a division blowup
  CHECK(bdpc_budget_ms(BudgetRule::Proportional, 1500.0, 0, 512, 256) ==
        doctest::Approx(1500.0));
  // a packet routed above its origin clamps at zero budget
  CHECK(bdpc_budget_ms(BudgetRule::Proportional, 1500.0, 1024, 2048, 256) ==
        doctest::Approx(0.0));
}

TEST_CASE("deadline manager: thresholds are inclusive on both sides") {
  BdpcWindow w(100);
  for (int i = 0; i < 100; ++i) w.push(i < 10);  // late rate exactly 0.10

  CHECK(bdpc_evaluate(w, 10, 0.10, 0.05, 1) == CellAction::Add);

  BdpcWindow nine(100);
  for (int i = 0; i < 100; ++i) nine.push(i < 9);  // 0.09: below the ceiling
  CHECK(bdpc_evaluate(nine, 10, 0.10, 0.05, 1) == CellAction::None);

  BdpcWindow five(100);
  for (int i = 0; i < 100; ++i) five.push(i < 5);  // exactly the floor
  CHECK(bdpc_evaluate(five, 10, 0.10, 0.05, 2) == CellAction::Delete);
  // the floor never deletes the last cell
  CHECK(bdpc_evaluate(five, 10, 0.10, 0.05, 1) == CellAction::None);

  BdpcWindow six(100);
  for (int i = 0; i < 100; ++i) six.push(i < 6);  // 0.06: inside the band
  CHECK(bdpc_evaluate(six, 10, 0.10, 0.05, 2) == CellAction::None);
}

TEST_CASE("deadline manager: short windows are never judged") {
  BdpcWindow w(100);
  for (int i = 0; i < 9; ++i) w.push(true);  // rate 1.0 but only 9 verdicts
  CHECK(bdpc_evaluate(w, 10, 0.10, 0.05, 1) == CellAction::None);
  w.push(true);
  CHECK(bdpc_evaluate(w, 10, 0.10, 0.05, 1) == CellAction::Add);
}
