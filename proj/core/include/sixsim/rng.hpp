#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sixsim {

// Deterministic random source. One Rng per named substream; all substreams
// of a run derive from the run seed plus the stream name, so adding or
// removing draws in one consumer never perturbs the sequences seen by the
// others. We avoid std::uniform_*_distribution on purpose: their output is
// implementation-defined, and run output must be reproducible byte for byte.
class Rng {
 public:
  Rng() : engine_(0) {}
  Rng(uint64_t run_seed, std::string_view stream_name);

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1). 53-bit resolution.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). bound must be > 0. Plain modulo: the bias
  // at our bounds (<= a few hundred) is ~1e-17 and the mapping is portable.
  uint64_t next_below(uint64_t bound) { return engine_() % bound; }

  // Uniform in [lo, hi).
  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Bernoulli draw.
  bool chance(double p) { return next_double() < p; }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 step, used to turn (seed, name) into well-separated engine
// seeds. Public because tests pin its outputs.
uint64_t splitmix64(uint64_t x);

// FNV-1a over the stream name.
uint64_t hash_name(std::string_view name);

// The named substreams one simulation run uses.
struct RngSet {
  Rng link;        // frame/ack loss draws
  Rng jitter;      // traffic timing and control-message period jitter
  Rng contention;  // shared-cell winner picks
  Rng sixp;        // candidate slot/channel draws

  explicit RngSet(uint64_t run_seed)
      : link(run_seed, "link"),
        jitter(run_seed, "jitter"),
        contention(run_seed, "contention"),
        sixp(run_seed, "sixp") {}
};

}  // namespace sixsim
