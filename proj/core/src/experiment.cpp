#include "sixsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "sixsim/engine.hpp"
#include "sixsim/topology.hpp"

namespace sixsim {

std::vector<RunTask> expand_plan(const ExperimentConfig& ec) {
  std::vector<RunTask> tasks;
  tasks.reserve(ec.arms.size() * ec.periods_s.size() * ec.seeds.size());
  for (const ArmSpec& arm : ec.arms)
    for (double period : ec.periods_s)
      for (uint64_t seed : ec.seeds) tasks.push_back({arm, period, seed});
  return tasks;
}

RunConfig task_config(const ExperimentConfig& ec, const RunTask& t) {
  RunConfig rc = ec.base;
  rc.pk_period_s = t.pk_period_s;
  rc.seed = t.seed;
  t.arm.apply(rc);
  return rc;
}

RunReport execute_task(const ExperimentConfig& ec, const RunTask& t) {
  RunConfig rc = task_config(ec, t);
  Topology topo = Topology::layered(rc.topo_groups, rc.topo_group_size,
                                    rc.link_pdr, rc.rssi_dbm);
  Simulation sim(rc, topo);
  RunReport report = sim.run();
  report.arm = t.arm.name;
  return report;
}

std::vector<RunReport> execute_plan(
    const ExperimentConfig& ec, int jobs,
    const std::function<void(size_t, size_t)>& progress) {
  const std::vector<RunTask> tasks = expand_plan(ec);
  std::vector<RunReport> out(tasks.size());
  if (tasks.empty()) return out;

  int workers = jobs;
  if (workers < 1)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));

  std::atomic<size_t> next{0};
  std::atomic<size_t> done{0};
  std::mutex progress_mu;
  auto work = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      out[i] = execute_task(ec, tasks[i]);
      size_t d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mu);
        progress(d, tasks.size());
      }
    }
  };

  if (workers == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& th : pool) th.join();
  return out;
}

}  // namespace sixsim
