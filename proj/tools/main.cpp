// Experiment runner: expands an arm x period x seed sweep, executes the runs
// on a worker pool, and writes every output table the analysis scripts read.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sixsim/config.hpp"
#include "sixsim/experiment.hpp"
#include "sixsim/metrics.hpp"
#include "sixsim/topology.hpp"

namespace fs = std::filesystem;
using namespace sixsim;

namespace {

// Exit codes: 0 ok, 1 reserved for CLI11 usage errors, then one code per
// failure family so scripts can tell them apart.
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;

int fail_config(const std::vector<std::string>& errors) {
  for (const std::string& e : errors) std::fprintf(stderr, "config: %s\n", e.c_str());
  return kExitConfig;
}

bool write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) return false;
  out << body;
  return out.good();
}

// Sanitize an arm name for use in a file name (slashes and spaces would
// splinter the output tree).
std::string file_token(const std::string& name) {
  std::string t = name;
  for (char& c : t)
    if (c == '/' || c == ' ' || c == '\\') c = '_';
  return t;
}

struct CommonOpts {
  std::string config_path;
  std::string output_dir = "out";
  std::string seeds;
  std::string arms;
  std::string periods;
  std::string budget_rule;
  int jobs = 0;
};

// Layers config file, environment and flags (that order) onto the default
// desk plan. Returns nonzero on the first error family encountered.
int resolve_plan(const CommonOpts& o, ExperimentConfig& ec) {
  std::vector<std::string> errors;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in) {
      std::fprintf(stderr, "io: cannot read config file '%s'\n",
                   o.config_path.c_str());
      return kExitIo;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    ec = parse_config_text(ss.str(), errors);
    if (!errors.empty()) return fail_config(errors);
  }
  apply_env_overrides(ec, errors);
  if (!errors.empty()) return fail_config(errors);

  if (!o.seeds.empty()) {
    std::vector<uint64_t> seeds;
    if (!parse_seed_list(o.seeds, seeds))
      return fail_config({"--seeds: expected '0..4' or '1,5,9', got '" +
                          o.seeds + "'"});
    ec.seeds = std::move(seeds);
  }
  if (!o.periods.empty()) {
    std::vector<double> periods;
    if (!parse_period_list(o.periods, periods))
      return fail_config({"--periods: expected comma-separated positive "
                          "seconds, got '" + o.periods + "'"});
    ec.periods_s = std::move(periods);
  }
  if (!o.arms.empty()) {
    std::vector<ArmSpec> keep;
    std::stringstream ss(o.arms);
    std::string name;
    while (std::getline(ss, name, ',')) {
      bool found = false;
      for (const ArmSpec& a : ec.arms)
        if (a.name == name) {
          keep.push_back(a);
          found = true;
        }
      if (!found)
        return fail_config({"--arms: no arm named '" + name + "' in the plan"});
    }
    ec.arms = std::move(keep);
  }
  if (!o.budget_rule.empty()) {
    if (o.budget_rule == "endtoend")
      ec.base.budget_rule = BudgetRule::EndToEnd;
    else if (o.budget_rule == "proportional")
      ec.base.budget_rule = BudgetRule::Proportional;
    else
      return fail_config({"--budget-rule: expected 'endtoend' or "
                          "'proportional', got '" + o.budget_rule + "'"});
  }

  std::vector<std::string> violations = ec.validate();
  if (!violations.empty()) return fail_config(violations);
  return 0;
}

int cmd_run(const CommonOpts& o) {
  ExperimentConfig ec = benchmark_plan_small(5);
  if (int rc = resolve_plan(o, ec)) return rc;

  fs::path dir(o.output_dir);
  std::error_code fserr;
  fs::create_directories(dir / "delays", fserr);
  fs::create_directories(dir / "nodes", fserr);
  if (fserr) {
    std::fprintf(stderr, "io: cannot create output dir '%s': %s\n",
                 o.output_dir.c_str(), fserr.message().c_str());
    return kExitIo;
  }

  std::vector<RunTask> plan = expand_plan(ec);
  std::vector<RunReport> reports = execute_plan(ec, o.jobs);

  std::string runs = runs_csv_header();
  for (const RunReport& r : reports) runs += runs_csv_row(r);
  std::vector<ArmAverages> by_arm = aggregate_by_arm(reports);
  std::vector<RatioRow> ratios =
      ratio_rows(by_arm, "leafCopy+BDPC", {"flood", "leafCopy", "MSF-baseline"});

  bool ok = write_file(dir / "runs.csv", runs) &&
            write_file(dir / "summary.csv", summary_csv(by_arm)) &&
            write_file(dir / "summary_by_period.csv",
                       summary_by_period_csv(aggregate_by_arm_period(reports))) &&
            write_file(dir / "ratios.csv", ratios_csv(ratios));

  for (size_t i = 0; ok && i < reports.size(); ++i) {
    const RunTask& t = plan[i];
    const RunReport& r = reports[i];
    char stem[160];
    std::snprintf(stem, sizeof stem, "%s_p%g_s%llu", file_token(t.arm.name).c_str(),
                  t.pk_period_s, static_cast<unsigned long long>(t.seed));
    std::string delays;
    delays.reserve(r.delays_ms.size() * 8);
    char line[32];
    for (double d : r.delays_ms) {
      std::snprintf(line, sizeof line, "%.1f\n", d);
      delays += line;
    }
    ok = write_file(dir / "delays" / (std::string(stem) + ".ms"), delays) &&
         write_file(dir / "nodes" / (std::string(stem) + ".csv"),
                    nodes_csv(r, task_config(ec, t).charge));
  }
  if (!ok) {
    std::fprintf(stderr, "io: failed writing into '%s'\n", o.output_dir.c_str());
    return kExitIo;
  }
  std::printf("%zu runs -> %s\n", reports.size(), o.output_dir.c_str());
  return 0;
}

int cmd_paper_plan(const std::string& out_path) {
  ExperimentConfig ec = benchmark_plan();
  std::string text = to_text(ec);
  if (out_path.empty() || out_path == "-") {
    std::fputs(text.c_str(), stdout);
    return 0;
  }
  if (!write_file(out_path, text)) {
    std::fprintf(stderr, "io: cannot write '%s'\n", out_path.c_str());
    return kExitIo;
  }
  return 0;
}

int cmd_topo(const CommonOpts& o) {
  ExperimentConfig ec = benchmark_plan_small(1);
  if (int rc = resolve_plan(o, ec)) return rc;
  const RunConfig& b = ec.base;
  Topology topo =
      Topology::layered(b.topo_groups, b.topo_group_size, b.link_pdr, b.rssi_dbm);
  std::printf("# %d nodes: sink 0, then %d groups of %d\n", topo.node_count(),
              topo.groups(), topo.group_size());
  std::printf("node,neighbors\n");
  for (NodeId n = 0; n < topo.node_count(); ++n) {
    std::string row = std::to_string(n) + ",";
    bool first = true;
    for (NodeId m : topo.neighbors(n)) {
      if (!first) row += ' ';
      row += std::to_string(m);
      first = false;
    }
    std::printf("%s\n", row.c_str());
  }
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  ExperimentConfig ec = benchmark_plan_small(5);
  if (int rc = resolve_plan(o, ec)) return rc;
  std::printf("ok: %zu arms x %zu periods x %zu seeds\n", ec.arms.size(),
              ec.periods_s.size(), ec.seeds.size());
  return 0;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_output) {
  cmd->add_option("--config", o.config_path, "experiment config file");
  if (with_output)
    cmd->add_option("--output-dir", o.output_dir, "directory for CSV output");
  cmd->add_option("--seeds", o.seeds, "seed list: '0..4' or '1,5,9'");
  cmd->add_option("--arms", o.arms, "comma-separated arm names to keep");
  cmd->add_option("--periods", o.periods, "comma-separated packet periods [s]");
  cmd->add_option("--jobs", o.jobs, "worker threads (default: hardware)");
  cmd->add_option("--budget-rule", o.budget_rule,
                  "per-hop deadline budget: endtoend | proportional");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slot-level simulator sweep runner"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "execute the sweep, write CSVs");
  add_common(run, run_opts, true);

  std::string plan_out;
  CLI::App* plan =
      app.add_subcommand("paper-plan", "emit the published 30-seed plan");
  plan->add_option("--output", plan_out, "file to write ('-' = stdout)");

  CommonOpts topo_opts;
  CLI::App* topo = app.add_subcommand("topo", "dump the benchmark topology");
  add_common(topo, topo_opts, false);

  CommonOpts val_opts;
  CLI::App* val = app.add_subcommand("validate", "lint a config and exit");
  add_common(val, val_opts, false);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(run_opts);
  if (plan->parsed()) return cmd_paper_plan(plan_out);
  if (topo->parsed()) return cmd_topo(topo_opts);
  if (val->parsed()) return cmd_validate(val_opts);
  return 0;
}
