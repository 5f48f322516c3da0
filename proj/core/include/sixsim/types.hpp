#pragma once

#include <cstdint>
#include <string>

namespace sixsim {

// Node identifiers. The sink is always node 0; field nodes count up from 1.
using NodeId = int32_t;
constexpr NodeId kRoot = 0;
constexpr NodeId kNoNode = -1;

// Absolute slot number since simulation start (slot 0 = first slot of the
// first slotframe). Never wraps at the durations we simulate.
using Asn = uint64_t;

// Replication label carried by a packet. Leaves stamp it once at generation
// time; it is never rewritten on the way up.
enum class Label : uint8_t { None, PP, AP };

// Which scheduling function drives cell management. Bdpc keeps the
// utilization-driven manager running on the child side and adds the
// deadline-driven parent-side manager on top.
enum class SfKind : uint8_t { Msf, Bdpc };

// Packet replication strategy, applied by leaves (copy count) and routers
// (what to do with a copy that comes through).
enum class Flooding : uint8_t { None, LeafCopy, MidFlood, MidFloodDrop, Flood };

// Common-ancestor constraint for alternate-parent eligibility.
enum class ApMode : uint8_t { Strict, Medium, Soft };

// How the per-hop delay budget is derived when classifying arrivals.
enum class BudgetRule : uint8_t { EndToEnd, Proportional };

const char* to_string(Label v);
const char* to_string(SfKind v);
const char* to_string(Flooding v);
const char* to_string(ApMode v);
const char* to_string(BudgetRule v);

// Parse helpers return false on unknown token (case-sensitive, the same
// spellings to_string produces).
bool parse_enum(const std::string& s, SfKind& out);
bool parse_enum(const std::string& s, Flooding& out);
bool parse_enum(const std::string& s, ApMode& out);
bool parse_enum(const std::string& s, BudgetRule& out);

}  // namespace sixsim
