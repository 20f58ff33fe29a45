#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fogsim/latency.hpp"
#include "fogsim/routing.hpp"
#include "fogsim/types.hpp"

namespace fogsim {

struct WorkloadStream {
  enum class Arrival { FixedInterval, Poisson };
  enum class KeyDist { Uniform, Hot };

  std::string label;  // namespaces keys: "<label>-k<i>", or "k<i>" when empty
  Arrival arrival = Arrival::FixedInterval;
  double interval_ms = 1000.0;  // FixedInterval
  double rate_rps = 1.0;        // Poisson, per robot
  int key_universe = 1;
  KeyDist key_dist = KeyDist::Uniform;
  double fraction_hot = 0.25;  // Hot: share of keys considered hot
  double hot_weight = 0.9;     // Hot: probability a request picks a hot key
  double request_bytes = 64.0;
  double response_bytes = 256.0;
  double deadline_ms = 0.0;     // 0 = none
  std::vector<NodeId> robots;   // empty = every robot

  std::string key_name(int index) const;

  bool operator==(const WorkloadStream&) const = default;
};

struct MobilityWaypoint {
  double t_ms = 0.0;
  Position pos;

  bool operator==(const MobilityWaypoint&) const = default;
};

struct HandoverConfig {
  double hysteresis_m = 5.0;
  double delay_ms = 50.0;

  bool operator==(const HandoverConfig&) const = default;
};

struct Scenario {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  RoutingPolicy policy;
  std::vector<WorkloadStream> workload;
  std::optional<SurgeMonitor> surge;
  std::map<NodeId, std::vector<MobilityWaypoint>> mobility;
  HandoverConfig handover;
  std::uint64_t seed = 0;
  bool seed_set = false;  // config must state the seed explicitly
  double duration_ms = 0.0;

  std::map<NodeId, std::vector<std::string>> prewarm;  // fog node -> keys at t=0
  std::set<NodeId> prewarm_all;                        // fog nodes holding every key at t=0
  std::map<NodeId, std::set<std::string>> holdings;    // robot -> keys it can share over d2d

  const NodeSpec* find_node(const NodeId& id) const;
  // Every key any stream can generate, in stream order then index order.
  std::vector<std::string> all_keys() const;

  bool operator==(const Scenario&) const = default;
};

// All problems at once, never first-error-only. Empty means valid.
struct ParseIssue {
  enum class Kind { Syntax, Validation };
  Kind kind = Kind::Validation;
  int line = 0;       // Syntax only
  std::string field;  // Validation only
  std::string message;
};

std::vector<ParseIssue> validate(const Scenario& s);

struct ParseResult {
  std::optional<Scenario> scenario;  // set only when issues is empty
  std::vector<ParseIssue> issues;
};

// JSON config text -> validated Scenario. Collects every syntax/validation
// issue it can find. The schema is documented in the README; committed
// fixtures live under configs/.
ParseResult parse_config(const std::string& text);

// Canonical form: sorted keys, stable number formatting. parse_config of this
// text reproduces an equal Scenario.
std::string serialize(const Scenario& s);

// FNV-1a over the canonical serialization, as a 16-digit hex string.
std::string config_hash(const Scenario& s);

}  // namespace fogsim
