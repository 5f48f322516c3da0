#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sixsim/sf_msf.hpp"
#include "sixsim/types.hpp"

namespace sixsim {

// Sliding window of late/on-time verdicts a parent keeps per child. Ring
// buffer: once full, each new verdict evicts the oldest one.
class BdpcWindow {
 public:
  explicit BdpcWindow(int capacity)
      : ring_(static_cast<size_t>(capacity), 0) {}

  void push(bool late) {
    uint8_t v = late ? 1 : 0;
    if (count_ < static_cast<int>(ring_.size())) {
      ring_[static_cast<size_t>(count_)] = v;
      ++count_;
      late_ += v;
    } else {
      late_ += v - ring_[head_];
      ring_[head_] = v;
      head_ = (head_ + 1) % ring_.size();
    }
  }

  void reset() {
    std::fill(ring_.begin(), ring_.end(), 0);
    head_ = 0;
    count_ = 0;
    late_ = 0;
  }

  int count() const { return count_; }
  int late_count() const { return late_; }
  double late_rate() const {
    return count_ == 0 ? 0.0 : static_cast<double>(late_) / count_;
  }

 private:
  std::vector<uint8_t> ring_;
  size_t head_ = 0;
  int count_ = 0;
  int late_ = 0;
};

// A packet is late when it has already consumed more than its delay budget;
// exactly on budget still counts as on time.
inline bool bdpc_late(double elapsed_ms, double budget_ms) {
  return elapsed_ms > budget_ms;
}

// Delay budget granted to a packet by the node holding it. End-to-end grants
// every hop the full deadline; proportional scales the deadline by the rank
// progress the packet has made, reaching the full deadline at the root
// (whose rank equals the base step, closing the fraction to one).
inline double bdpc_budget_ms(BudgetRule rule, double max_delay_ms,
                             int32_t origin_rank, int32_t node_rank,
                             int32_t rank_step) {
  if (rule == BudgetRule::EndToEnd) return max_delay_ms;
  if (origin_rank <= 0) return max_delay_ms;
  double fraction =
      static_cast<double>(origin_rank - node_rank + rank_step) / origin_rank;
  fraction = std::clamp(fraction, 0.0, 1.0);
  return max_delay_ms * fraction;
}

// Deadline-driven cell management, run by the parent against one child's
// verdict window. Too many late arrivals grow the child's tx bandwidth; a
// clean window shrinks it back, never below one cell. Short windows are not
// judged at all.
inline CellAction bdpc_evaluate(const BdpcWindow& w, int min_verdicts,
                                double sf_max, double sf_min, int cells_held) {
  if (w.count() < min_verdicts) return CellAction::None;
  double rate = w.late_rate();
  if (rate >= sf_max) return CellAction::Add;
  if (rate <= sf_min && cells_held > 1) return CellAction::Delete;
  return CellAction::None;
}

}  // namespace sixsim
