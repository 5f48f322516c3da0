#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sixsim/config.hpp"
#include "sixsim/metrics.hpp"

namespace sixsim {

// One cell of a sweep: a strategy arm at one packet period under one seed.
struct RunTask {
  ArmSpec arm;
  double pk_period_s = 0.0;
  uint64_t seed = 0;
};

// Expands a sweep into its run list, arms outermost, then periods, then
// seeds. This order is the row order of every output table.
std::vector<RunTask> expand_plan(const ExperimentConfig& ec);

// The full config one task runs with: the sweep base, the task's period and
// seed, and the arm's strategy fields layered on top.
RunConfig task_config(const ExperimentConfig& ec, const RunTask& t);

// Runs one task start to finish.
RunReport execute_task(const ExperimentConfig& ec, const RunTask& t);

// Runs every task of the sweep on `jobs` worker threads (values < 1 use the
// hardware thread count) and returns the reports in task order, independent
// of scheduling. The optional callback fires after each finished run with
// (finished, total); calls are serialized.
std::vector<RunReport> execute_plan(
    const ExperimentConfig& ec, int jobs,
    const std::function<void(size_t, size_t)>& progress = nullptr);

}  // namespace sixsim
