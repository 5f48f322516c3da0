#pragma once

#include "sixsim/types.hpp"

namespace sixsim {

// Verdict of a cell-management evaluation.
enum class CellAction : uint8_t { None, Add, Delete };

// Utilization window: evaluate after 100 elapsed cells, grow above 75 used,
// shrink below 25 used.
constexpr int kMsfMaxNumCells = 100;
constexpr int kMsfLimHigh = 75;
constexpr int kMsfLimLow = 25;

// Elapsed/used counters for the negotiated tx cells toward one parent. Each
// parent has its own pair; parent changes start from zeroed counters.
struct MsfCounters {
  int nce = 0;  // cells elapsed
  int ncu = 0;  // cells used (a transmission attempt happened)
};

// Account one elapsed tx cell toward the counters' parent. Returns the
// action once the window is over (nce passing kMsfMaxNumCells), None
// otherwise. The window resets whenever it completes, whether or not the
// caller manages to signal the action. `cells_held` guards the shrink path:
// the last cell toward a parent is never offered for deletion.
inline CellAction msf_on_cell_elapsed(MsfCounters& c, bool used,
                                      int cells_held) {
  ++c.nce;
  if (used) ++c.ncu;
  if (c.nce <= kMsfMaxNumCells) return CellAction::None;
  CellAction action = CellAction::None;
  if (c.ncu > kMsfLimHigh)
    action = CellAction::Add;
  else if (c.ncu < kMsfLimLow && cells_held > 1)
    action = CellAction::Delete;
  c.nce = 0;
  c.ncu = 0;
  return action;
}

}  // namespace sixsim
