#include "sixsim/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace sixsim {

const char* to_string(Label v) {
  switch (v) {
    case Label::None: return "none";
    case Label::PP: return "PP";
    case Label::AP: return "AP";
  }
  return "?";
}

const char* to_string(SfKind v) {
  switch (v) {
    case SfKind::Msf: return "MSF";
    case SfKind::Bdpc: return "BDPC";
  }
  return "?";
}

const char* to_string(Flooding v) {
  switch (v) {
    case Flooding::None: return "none";
    case Flooding::LeafCopy: return "leafCopy";
    case Flooding::MidFlood: return "mid-flood";
    case Flooding::MidFloodDrop: return "mid-flood-drop";
    case Flooding::Flood: return "flood";
  }
  return "?";
}

const char* to_string(ApMode v) {
  switch (v) {
    case ApMode::Strict: return "strict";
    case ApMode::Medium: return "medium";
    case ApMode::Soft: return "soft";
  }
  return "?";
}

const char* to_string(BudgetRule v) {
  switch (v) {
    case BudgetRule::EndToEnd: return "endtoend";
    case BudgetRule::Proportional: return "proportional";
  }
  return "?";
}

bool parse_enum(const std::string& s, SfKind& out) {
  if (s == "MSF") out = SfKind::Msf;
  else if (s == "BDPC") out = SfKind::Bdpc;
  else return false;
  return true;
}

bool parse_enum(const std::string& s, Flooding& out) {
  if (s == "none") out = Flooding::None;
  else if (s == "leafCopy") out = Flooding::LeafCopy;
  else if (s == "mid-flood") out = Flooding::MidFlood;
  else if (s == "mid-flood-drop") out = Flooding::MidFloodDrop;
  else if (s == "flood") out = Flooding::Flood;
  else return false;
  return true;
}

bool parse_enum(const std::string& s, ApMode& out) {
  if (s == "strict") out = ApMode::Strict;
  else if (s == "medium") out = ApMode::Medium;
  else if (s == "soft") out = ApMode::Soft;
  else return false;
  return true;
}

bool parse_enum(const std::string& s, BudgetRule& out) {
  if (s == "endtoend") out = BudgetRule::EndToEnd;
  else if (s == "proportional") out = BudgetRule::Proportional;
  else return false;
  return true;
}

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> errs;
  auto req = [&errs](bool ok, const char* msg) {
    if (!ok) errs.emplace_back(msg);
  };
  req(slotframe_length >= 2, "slotframe_length: must be >= 2 (one shared slot plus negotiable slots)");
  req(timeslot_ms > 0.0, "timeslot_ms: must be > 0");
  req(channels >= 1, "channels: must be >= 1");
  req(duration_frames >= 1, "duration_frames: must be >= 1");
  req(warmup_frames >= 0, "warmup_frames: must be >= 0");
  req(measure_after_frames >= 0 && measure_after_frames < duration_frames,
      "measure_after_frames: must be in [0, duration_frames)");
  req(pk_period_s > 0.0, "pk_period_s: must be > 0");
  req(pk_variance >= 0.0 && pk_variance < 1.0, "pk_variance: must be in [0, 1)");
  req(pk_size_bytes > 0, "pk_size_bytes: must be > 0");
  req(max_delay_ms > 0.0, "max_delay_ms: must be > 0");
  req(queue_capacity >= 1, "queue_capacity: must be >= 1");
  req(max_retries >= 0, "max_retries: must be >= 0");
  req(sf_min < sf_max, "sf_min: must be strictly below sf_max");
  req(sf_min >= 0.0, "sf_min: must be >= 0");
  req(sf_max <= 1.0, "sf_max: must be <= 1");
  req(prehop_add_cells >= 1, "prehop_add_cells: must be >= 1");
  req(bdpc_window >= 1, "bdpc_window: must be >= 1");
  req(bdpc_min_verdicts >= 1, "bdpc_min_verdicts: must be >= 1");
  req(bdpc_cooldown_frames >= 0, "bdpc_cooldown_frames: must be >= 0");
  req(dio_period_frames >= 2, "dio_period_frames: must be >= 2 (jitter is +/- 1 frame)");
  req(neighbor_stale_frames >= 1, "neighbor_stale_frames: must be >= 1");
  req(rank_base_min >= 1, "rank_base_min: must be >= 1");
  req(rank_base_step >= 1, "rank_base_step: must be >= 1");
  req(parent_set_cap >= 1, "parent_set_cap: must be >= 1");
  req(sixp_timeout_frames >= 1, "sixp_timeout_frames: must be >= 1");
  req(sixp_candidate_factor >= 1, "sixp_candidate_factor: must be >= 1");
  req(flow_window >= 1, "flow_window: must be >= 1");
  req(topo_groups >= 1, "topo_groups: must be >= 1");
  req(topo_group_size >= 1, "topo_group_size: must be >= 1");
  req(link_pdr > 0.0 && link_pdr <= 1.0, "link_pdr: must be in (0, 1]");
  req(charge.battery_c > 0.0, "battery_c: must be > 0");
  return errs;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errs = base.validate();
  if (arms.empty()) errs.emplace_back("arms: at least one arm required");
  for (size_t i = 0; i < arms.size(); ++i) {
    if (arms[i].name.empty())
      errs.emplace_back("arms: arm " + std::to_string(i) + " has no name");
    for (size_t j = i + 1; j < arms.size(); ++j)
      if (arms[i].name == arms[j].name)
        errs.emplace_back("arms: duplicate arm name '" + arms[i].name + "'");
    if (arms[i].sf_min >= arms[i].sf_max)
      errs.emplace_back("arm '" + arms[i].name + "': sf_min must be strictly below sf_max");
  }
  if (seeds.empty()) errs.emplace_back("seeds: at least one seed required");
  if (periods_s.empty()) errs.emplace_back("periods: at least one period required");
  for (double p : periods_s)
    if (p <= 0.0) errs.emplace_back("periods: values must be > 0");
  return errs;
}

static std::vector<ArmSpec> benchmark_arms() {
  auto msf_arm = [](const char* name, Flooding f) {
    ArmSpec a;
    a.name = name;
    a.sf_kind = SfKind::Msf;
    a.flooding = f;
    a.ap_mode = ApMode::Strict;
    return a;
  };
  std::vector<ArmSpec> arms;
  arms.push_back(msf_arm("MSF-baseline", Flooding::None));
  arms.push_back(msf_arm("leafCopy", Flooding::LeafCopy));
  arms.push_back(msf_arm("mid-flood", Flooding::MidFlood));
  arms.push_back(msf_arm("mid-flood-drop", Flooding::MidFloodDrop));
  arms.push_back(msf_arm("flood", Flooding::Flood));
  ArmSpec bdpc;
  bdpc.name = "leafCopy+BDPC";
  bdpc.sf_kind = SfKind::Bdpc;
  bdpc.flooding = Flooding::LeafCopy;
  bdpc.ap_mode = ApMode::Strict;
  bdpc.sf_max = 0.10;
  bdpc.sf_min = 0.05;
  arms.push_back(bdpc);
  return arms;
}

ExperimentConfig benchmark_plan() { return benchmark_plan_small(30); }

ExperimentConfig benchmark_plan_small(int seeds) {
  ExperimentConfig ec;
  ec.arms = benchmark_arms();
  ec.periods_s = {5.0, 10.0, 15.0};
  // The reference tables report a formed network: statistics start after the
  // control plane has converged, while the transient still runs in full.
  ec.base.measure_after_frames = 500;
  for (int s = 0; s < seeds; ++s) ec.seeds.push_back(static_cast<uint64_t>(s));
  return ec;
}

// ---------------------------------------------------------------------------
// key-value text format
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool to_int(const std::string& v, int& out) {
  char* end = nullptr;
  long val = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') return false;
  out = static_cast<int>(val);
  return true;
}

bool to_u64(const std::string& v, uint64_t& out) {
  char* end = nullptr;
  unsigned long long val = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') return false;
  out = val;
  return true;
}

bool to_double(const std::string& v, double& out) {
  char* end = nullptr;
  double val = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') return false;
  out = val;
  return true;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Key tables: keep set_base_key, write_base_keys and base_key_names in sync
// when adding a config field.

bool set_base_key(RunConfig& c, const std::string& k, const std::string& v) {
  if (k == "seed") return to_u64(v, c.seed);
  if (k == "slotframe_length") return to_int(v, c.slotframe_length);
  if (k == "timeslot_ms") return to_double(v, c.timeslot_ms);
  if (k == "channels") return to_int(v, c.channels);
  if (k == "duration_frames") return to_int(v, c.duration_frames);
  if (k == "warmup_frames") return to_int(v, c.warmup_frames);
  if (k == "measure_after_frames") return to_int(v, c.measure_after_frames);
  if (k == "pk_period_s") return to_double(v, c.pk_period_s);
  if (k == "pk_variance") return to_double(v, c.pk_variance);
  if (k == "pk_size_bytes") return to_int(v, c.pk_size_bytes);
  if (k == "max_delay_ms") return to_double(v, c.max_delay_ms);
  if (k == "queue_capacity") return to_int(v, c.queue_capacity);
  if (k == "max_retries") return to_int(v, c.max_retries);
  if (k == "sf_kind") return parse_enum(v, c.sf_kind);
  if (k == "flooding") return parse_enum(v, c.flooding);
  if (k == "ap_mode") return parse_enum(v, c.ap_mode);
  if (k == "sf_max") return to_double(v, c.sf_max);
  if (k == "sf_min") return to_double(v, c.sf_min);
  if (k == "prehop_add_cells") return to_int(v, c.prehop_add_cells);
  if (k == "budget_rule") return parse_enum(v, c.budget_rule);
  if (k == "bdpc_window") return to_int(v, c.bdpc_window);
  if (k == "bdpc_min_verdicts") return to_int(v, c.bdpc_min_verdicts);
  if (k == "bdpc_cooldown_frames") return to_int(v, c.bdpc_cooldown_frames);
  if (k == "dio_period_frames") return to_int(v, c.dio_period_frames);
  if (k == "neighbor_stale_frames") return to_int(v, c.neighbor_stale_frames);
  if (k == "rank_base_min") return to_int(v, c.rank_base_min);
  if (k == "rank_base_step") return to_int(v, c.rank_base_step);
  if (k == "parent_set_cap") return to_int(v, c.parent_set_cap);
  if (k == "sixp_timeout_frames") return to_int(v, c.sixp_timeout_frames);
  if (k == "sixp_candidate_factor") return to_int(v, c.sixp_candidate_factor);
  if (k == "flow_window") return to_int(v, c.flow_window);
  if (k == "topo_groups") return to_int(v, c.topo_groups);
  if (k == "topo_group_size") return to_int(v, c.topo_group_size);
  if (k == "link_pdr") return to_double(v, c.link_pdr);
  if (k == "rssi_dbm") return to_double(v, c.rssi_dbm);
  if (k == "charge_tx_data_rx_ack_uc") return to_double(v, c.charge.tx_data_rx_ack_uc);
  if (k == "charge_rx_data_tx_ack_uc") return to_double(v, c.charge.rx_data_tx_ack_uc);
  if (k == "charge_tx_data_only_uc") return to_double(v, c.charge.tx_data_only_uc);
  if (k == "charge_rx_data_only_uc") return to_double(v, c.charge.rx_data_only_uc);
  if (k == "charge_rx_idle_uc") return to_double(v, c.charge.rx_idle_uc);
  if (k == "charge_sleep_uc") return to_double(v, c.charge.sleep_uc);
  if (k == "battery_c") return to_double(v, c.charge.battery_c);
  return false;
}

const char* const kBaseKeyNames[] = {
    "seed", "slotframe_length", "timeslot_ms", "channels", "duration_frames",
    "warmup_frames", "measure_after_frames", "pk_period_s", "pk_variance",
    "pk_size_bytes",
    "max_delay_ms", "queue_capacity", "max_retries", "sf_kind", "flooding",
    "ap_mode", "sf_max", "sf_min", "prehop_add_cells", "budget_rule",
    "bdpc_window", "bdpc_min_verdicts", "bdpc_cooldown_frames",
    "dio_period_frames", "neighbor_stale_frames", "rank_base_min",
    "rank_base_step", "parent_set_cap", "sixp_timeout_frames",
    "sixp_candidate_factor", "flow_window", "topo_groups", "topo_group_size",
    "link_pdr", "rssi_dbm", "charge_tx_data_rx_ack_uc",
    "charge_rx_data_tx_ack_uc", "charge_tx_data_only_uc",
    "charge_rx_data_only_uc", "charge_rx_idle_uc", "charge_sleep_uc",
    "battery_c"};

void write_base_keys(const RunConfig& c, std::string& out) {
  auto kv = [&out](const char* k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  };
  kv("seed", std::to_string(c.seed));
  kv("slotframe_length", std::to_string(c.slotframe_length));
  kv("timeslot_ms", fmt_double(c.timeslot_ms));
  kv("channels", std::to_string(c.channels));
  kv("duration_frames", std::to_string(c.duration_frames));
  kv("warmup_frames", std::to_string(c.warmup_frames));
  kv("measure_after_frames", std::to_string(c.measure_after_frames));
  kv("pk_period_s", fmt_double(c.pk_period_s));
  kv("pk_variance", fmt_double(c.pk_variance));
  kv("pk_size_bytes", std::to_string(c.pk_size_bytes));
  kv("max_delay_ms", fmt_double(c.max_delay_ms));
  kv("queue_capacity", std::to_string(c.queue_capacity));
  kv("max_retries", std::to_string(c.max_retries));
  kv("sf_kind", to_string(c.sf_kind));
  kv("flooding", to_string(c.flooding));
  kv("ap_mode", to_string(c.ap_mode));
  kv("sf_max", fmt_double(c.sf_max));
  kv("sf_min", fmt_double(c.sf_min));
  kv("prehop_add_cells", std::to_string(c.prehop_add_cells));
  kv("budget_rule", to_string(c.budget_rule));
  kv("bdpc_window", std::to_string(c.bdpc_window));
  kv("bdpc_min_verdicts", std::to_string(c.bdpc_min_verdicts));
  kv("bdpc_cooldown_frames", std::to_string(c.bdpc_cooldown_frames));
  kv("dio_period_frames", std::to_string(c.dio_period_frames));
  kv("neighbor_stale_frames", std::to_string(c.neighbor_stale_frames));
  kv("rank_base_min", std::to_string(c.rank_base_min));
  kv("rank_base_step", std::to_string(c.rank_base_step));
  kv("parent_set_cap", std::to_string(c.parent_set_cap));
  kv("sixp_timeout_frames", std::to_string(c.sixp_timeout_frames));
  kv("sixp_candidate_factor", std::to_string(c.sixp_candidate_factor));
  kv("flow_window", std::to_string(c.flow_window));
  kv("topo_groups", std::to_string(c.topo_groups));
  kv("topo_group_size", std::to_string(c.topo_group_size));
  kv("link_pdr", fmt_double(c.link_pdr));
  kv("rssi_dbm", fmt_double(c.rssi_dbm));
  kv("charge_tx_data_rx_ack_uc", fmt_double(c.charge.tx_data_rx_ack_uc));
  kv("charge_rx_data_tx_ack_uc", fmt_double(c.charge.rx_data_tx_ack_uc));
  kv("charge_tx_data_only_uc", fmt_double(c.charge.tx_data_only_uc));
  kv("charge_rx_data_only_uc", fmt_double(c.charge.rx_data_only_uc));
  kv("charge_rx_idle_uc", fmt_double(c.charge.rx_idle_uc));
  kv("charge_sleep_uc", fmt_double(c.charge.sleep_uc));
  kv("battery_c", fmt_double(c.charge.battery_c));
}

bool set_arm_key(ArmSpec& a, const std::string& k, const std::string& v) {
  if (k == "sf_kind") return parse_enum(v, a.sf_kind);
  if (k == "flooding") return parse_enum(v, a.flooding);
  if (k == "ap_mode") return parse_enum(v, a.ap_mode);
  if (k == "sf_max") return to_double(v, a.sf_max);
  if (k == "sf_min") return to_double(v, a.sf_min);
  return false;
}

}  // namespace

std::string to_text(const ExperimentConfig& ec) {
  std::string out;
  out += "# simulation sweep configuration\n";
  out += "seeds = ";
  // Contiguous 0..n-1 seed lists are the common case; keep them readable.
  bool contiguous = true;
  for (size_t i = 0; i < ec.seeds.size(); ++i)
    if (ec.seeds[i] != ec.seeds.front() + i) contiguous = false;
  if (contiguous && ec.seeds.size() > 1) {
    out += std::to_string(ec.seeds.front()) + ".." + std::to_string(ec.seeds.back());
  } else {
    for (size_t i = 0; i < ec.seeds.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(ec.seeds[i]);
    }
  }
  out += "\n";
  out += "periods = ";
  for (size_t i = 0; i < ec.periods_s.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(ec.periods_s[i]);
  }
  out += "\n\n";
  write_base_keys(ec.base, out);
  for (const ArmSpec& a : ec.arms) {
    out += "\n[arm " + a.name + "]\n";
    out += "sf_kind = " + std::string(to_string(a.sf_kind)) + "\n";
    out += "flooding = " + std::string(to_string(a.flooding)) + "\n";
    out += "ap_mode = " + std::string(to_string(a.ap_mode)) + "\n";
    out += "sf_max = " + fmt_double(a.sf_max) + "\n";
    out += "sf_min = " + fmt_double(a.sf_min) + "\n";
  }
  return out;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   std::vector<std::string>& errors) {
  ExperimentConfig ec;
  ec.arms.clear();
  ec.periods_s.clear();
  ArmSpec* arm = nullptr;

  size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++lineno;

    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.rfind("[arm ", 0) != 0) {
        errors.push_back("line " + std::to_string(lineno) + ": bad section header '" + line + "'");
        arm = nullptr;
        continue;
      }
      std::string name = trim(line.substr(5, line.size() - 6));
      if (name.empty()) {
        errors.push_back("line " + std::to_string(lineno) + ": arm section needs a name");
        arm = nullptr;
        continue;
      }
      ec.arms.emplace_back();
      ec.arms.back().name = name;
      arm = &ec.arms.back();
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));

    if (arm) {
      if (!set_arm_key(*arm, key, val))
        errors.push_back("line " + std::to_string(lineno) + ": unknown arm key or bad value '" + key + "'");
      continue;
    }
    if (key == "seeds") {
      if (!parse_seed_list(val, ec.seeds))
        errors.push_back("line " + std::to_string(lineno) + ": bad seed list '" + val + "'");
      continue;
    }
    if (key == "periods") {
      if (!parse_period_list(val, ec.periods_s))
        errors.push_back("line " + std::to_string(lineno) + ": bad period list '" + val + "'");
      continue;
    }
    if (!set_base_key(ec.base, key, val))
      errors.push_back("line " + std::to_string(lineno) + ": unknown key or bad value '" + key + "'");
  }

  if (ec.arms.empty()) {
    // A config without arm sections describes a single run with the base
    // strategy fields.
    ArmSpec a;
    a.name = "default";
    a.sf_kind = ec.base.sf_kind;
    a.flooding = ec.base.flooding;
    a.ap_mode = ec.base.ap_mode;
    a.sf_max = ec.base.sf_max;
    a.sf_min = ec.base.sf_min;
    ec.arms.push_back(a);
  }
  if (ec.periods_s.empty()) ec.periods_s.push_back(ec.base.pk_period_s);
  if (ec.seeds.empty()) ec.seeds.push_back(ec.base.seed);
  return ec;
}

std::vector<std::string> apply_env_overrides(ExperimentConfig& ec,
                                             std::vector<std::string>& errors) {
  std::vector<std::string> applied;
  for (const char* key : kBaseKeyNames) {
    std::string env = "SIXSIM_";
    for (const char* p = key; *p; ++p)
      env += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    const char* val = std::getenv(env.c_str());
    if (!val) continue;
    if (set_base_key(ec.base, key, val))
      applied.push_back(env + "=" + val);
    else
      errors.push_back("environment override " + env + ": bad value '" + val + "'");
  }
  return applied;
}

bool parse_seed_list(const std::string& s, std::vector<uint64_t>& out) {
  std::vector<uint64_t> seeds;
  size_t dots = s.find("..");
  if (dots != std::string::npos) {
    uint64_t lo = 0, hi = 0;
    if (!to_u64(trim(s.substr(0, dots)), lo)) return false;
    if (!to_u64(trim(s.substr(dots + 2)), hi)) return false;
    if (hi < lo) return false;
    for (uint64_t v = lo; v <= hi; ++v) seeds.push_back(v);
  } else {
    size_t pos = 0;
    while (pos <= s.size()) {
      size_t comma = s.find(',', pos);
      std::string item = trim(s.substr(pos, comma == std::string::npos ? comma : comma - pos));
      if (item.empty()) return false;
      uint64_t v;
      if (!to_u64(item, v)) return false;
      seeds.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (seeds.empty()) return false;
  }
  out = std::move(seeds);
  return true;
}

bool parse_period_list(const std::string& s, std::vector<double>& out) {
  std::vector<double> periods;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    std::string item = trim(s.substr(pos, comma == std::string::npos ? comma : comma - pos));
    if (item.empty()) return false;
    double v;
    if (!to_double(item, v) || v <= 0.0) return false;
    periods.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (periods.empty()) return false;
  out = std::move(periods);
  return true;
}

}  // namespace sixsim
