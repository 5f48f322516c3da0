#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sixsim/types.hpp"

namespace sixsim {

// Per-slot radio charge, in microcoulombs, plus the battery budget used to
// extrapolate lifetime. One entry per slot outcome; a slot has exactly one
// outcome per node.
struct ChargeConfig {
  double tx_data_rx_ack_uc = 54.5;  // sent a frame, heard the ack
  double rx_data_tx_ack_uc = 32.6;  // received a frame, answered the ack
  double tx_data_only_uc = 49.5;    // sent a frame, no ack heard (or bcast)
  double rx_data_only_uc = 22.6;    // received a frame that carries no ack
  double rx_idle_uc = 6.4;          // listened, nothing arrived
  double sleep_uc = 0.0;
  double battery_c = 2821.5;  // coulombs
};

// Everything one simulation run needs. Defaults reproduce the benchmark
// setup; experiment arms override the strategy fields.
struct RunConfig {
  uint64_t seed = 0;

  // --- TSCH timing ---
  int slotframe_length = 101;  // slots per slotframe
  double timeslot_ms = 10.0;
  int channels = 16;
  int duration_frames = 10000;

  // --- application traffic ---
  int warmup_frames = 30;    // no generation before this many slotframes
  double pk_period_s = 5.0;  // mean inter-packet gap per node
  double pk_variance = 0.05; // gap = period * (1 + U(-var, +var))
  int pk_size_bytes = 90;
  double max_delay_ms = 1500.0;  // end-to-end deadline

  // Steady-state measurement: packets created before this frame still move
  // through the network (and keep warming queues, schedules and scheduling
  // functions) but are excluded from reported statistics, and reported
  // charge/lifetime figures cover only the interval from this frame on.
  // 0 measures the whole run, formation transient included.
  int measure_after_frames = 0;

  // --- MAC ---
  int queue_capacity = 10;
  int max_retries = 5;  // retransmissions after the first attempt

  // --- strategy under test ---
  SfKind sf_kind = SfKind::Msf;
  Flooding flooding = Flooding::None;
  ApMode ap_mode = ApMode::Strict;

  // --- deadline-driven cell manager ---
  double sf_max = 0.10;  // late-rate ceiling: at/above -> add cells
  double sf_min = 0.05;  // late-rate floor: at/below -> delete cells
  int prehop_add_cells = 1;
  BudgetRule budget_rule = BudgetRule::EndToEnd;
  int bdpc_window = 100;        // verdicts kept per child
  int bdpc_min_verdicts = 10;   // no decisions before this many
  int bdpc_cooldown_frames = 1; // min slotframes between decisions per child

  // --- routing ---
  int dio_period_frames = 4;      // +/- 1 frame jitter
  int neighbor_stale_frames = 500;
  int rank_base_min = 256;
  int rank_base_step = 256;  // hysteresis for parent switch = step / 2
  int parent_set_cap = 8;    // ids advertised per control message

  // --- cell negotiation ---
  int sixp_timeout_frames = 2;
  int sixp_candidate_factor = 3;  // candidates proposed per requested cell

  // --- duplicate filter ---
  int flow_window = 64;  // sequence numbers remembered per source

  // --- benchmark graph ---
  int topo_groups = 5;
  int topo_group_size = 4;
  double link_pdr = 0.75;
  double rssi_dbm = -91.0;

  ChargeConfig charge;

  double frame_ms() const { return slotframe_length * timeslot_ms; }
  double sim_seconds() const {
    return duration_frames * frame_ms() / 1000.0;
  }

  // Empty when the config is usable; otherwise one line per violated rule,
  // each naming the offending key.
  std::vector<std::string> validate() const;
};

// One experiment arm: a named strategy bundle layered over the base config.
struct ArmSpec {
  std::string name;
  SfKind sf_kind = SfKind::Msf;
  Flooding flooding = Flooding::None;
  ApMode ap_mode = ApMode::Strict;
  double sf_max = 0.10;
  double sf_min = 0.05;

  void apply(RunConfig& cfg) const {
    cfg.sf_kind = sf_kind;
    cfg.flooding = flooding;
    cfg.ap_mode = ap_mode;
    cfg.sf_max = sf_max;
    cfg.sf_min = sf_min;
  }
};

// A full sweep: every arm x period x seed combination is one run.
struct ExperimentConfig {
  RunConfig base;
  std::vector<ArmSpec> arms;
  std::vector<double> periods_s = {5.0, 10.0, 15.0};
  std::vector<uint64_t> seeds;

  std::vector<std::string> validate() const;
};

// The six benchmark arms with the published sweep (30 seeds, periods
// 5/10/15 s, 10000 slotframes).
ExperimentConfig benchmark_plan();

// Same arms, trimmed to `seeds` seeds (desk-scale checks).
ExperimentConfig benchmark_plan_small(int seeds);

// --- flat key-value config text ---
//
// Format: one `key = value` per line, `#` starts a comment. `[arm NAME]`
// opens an arm section whose keys (sf_kind, flooding, ap_mode, sf_max,
// sf_min) describe one arm. Keys before the first section apply to the base
// run config or the sweep (seeds, periods).
std::string to_text(const ExperimentConfig& ec);

// Parses config text. Unknown keys and malformed values are reported in
// `errors` (one line each); returns the config with every recognized key
// applied. `errors` empty means a clean parse.
ExperimentConfig parse_config_text(const std::string& text,
                                   std::vector<std::string>& errors);

// Applies SIXSIM_<UPPERCASE_KEY> environment overrides to base-config keys
// (e.g. SIXSIM_DURATION_FRAMES=500). Returns the list of applied overrides;
// unknown or malformed values are appended to `errors`.
std::vector<std::string> apply_env_overrides(ExperimentConfig& ec,
                                             std::vector<std::string>& errors);

// "0..4" (inclusive range) or "1,5,9" -> seed list. False on bad syntax.
bool parse_seed_list(const std::string& s, std::vector<uint64_t>& out);

// "5,10,15" -> period list. False on bad syntax or non-positive values.
bool parse_period_list(const std::string& s, std::vector<double>& out);

}  // namespace sixsim
