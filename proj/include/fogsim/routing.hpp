#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fogsim/cache.hpp"
#include "fogsim/latency.hpp"
#include "fogsim/types.hpp"

namespace fogsim {

// Nodes plus symmetric links. std::map keeps every iteration order stable,
// which the deterministic engine depends on.
struct Topology {
  std::map<NodeId, NodeSpec> nodes;
  std::vector<LinkSpec> links;

  const LinkSpec* find_link(const NodeId& a, const NodeId& b) const;
  bool has_link(const NodeId& a, const NodeId& b) const { return find_link(a, b) != nullptr; }
};

enum class PolicyKind { FrsOnly, D2d, MultiFrs };

const char* policy_kind_name(PolicyKind k);

struct RoutingPolicy {
  PolicyKind kind = PolicyKind::FrsOnly;
  double d2d_range_m = 0.0;         // D2d; 0 degenerates to FrsOnly behavior
  double d2d_internal_lag_ms = 0.0;  // per-exchange busy time at the data holder
  std::vector<std::pair<NodeId, NodeId>> adjacency;  // MultiFrs; symmetric pairs

  bool adjacent(const NodeId& x, const NodeId& y) const;
  // Neighbors of x in ascending id order (deterministic lookup order).
  std::vector<NodeId> neighbors(const NodeId& x) const;

  bool operator==(const RoutingPolicy&) const = default;
};

enum class Resolution { FrsCacheHit, AdjacentFrsHit, CloudFetch, D2d };

const char* resolution_name(Resolution r);

struct Hop {
  NodeId from;
  NodeId to;
  double payload_bytes = 0.0;
  bool serve_at_dst = false;       // dst queues the request for service on arrival
  bool cache_fill_at_dst = false;  // read-through population on arrival at dst

  bool operator==(const Hop&) const = default;
};

// Closed walk starting and ending at the origin robot.
struct RoutePlan {
  std::vector<Hop> hops;
  std::vector<NodeId> serving_nodes;
  Resolution resolution = Resolution::FrsCacheHit;

  bool operator==(const RoutePlan&) const = default;
};

// Everything plan_route consults. Caches are mutable because a hit touches
// recency at plan time; all other state is read-only here.
struct SystemView {
  const Topology* topo = nullptr;
  const std::map<NodeId, Position>* positions = nullptr;  // current, after moves
  const std::map<NodeId, NodeId>* assignment = nullptr;   // robot -> fog node
  std::map<NodeId, Cache>* caches = nullptr;              // fog node -> cache
  const std::map<NodeId, std::set<std::string>>* holdings = nullptr;  // robot -> keys
  const std::map<NodeId, NodeId>* fog_cloud = nullptr;    // fog node -> cloud region
};

// Nearest FRS/SubFRS that both covers the robot and has a link to it,
// ties broken by lowest id. nullopt = no reachable coverage.
std::optional<NodeId> assign_frs(const NodeId& robot, const Topology& topo,
                                 const std::map<NodeId, Position>& positions);

struct PlanError {
  std::string message;
};

// Plans the full walk for one request under the given policy. Consults cache
// and holding state as of now; the engine freezes the returned plan, so later
// topology or cache changes never affect an in-flight request.
RoutePlan plan_route(const Request& req, const SystemView& view, const RoutingPolicy& policy);

struct SurgeMonitor {
  double window_ms = 1000.0;
  double threshold_rps = 10.0;
  double reassignment_fraction = 0.5;

  bool operator==(const SurgeMonitor&) const = default;
};

// True iff arrivals inside (now - window, now] divided by the window length
// strictly exceed the threshold.
bool check_surge(const SurgeMonitor& monitor, const std::vector<double>& arrivals_ms, double now_ms);

struct SpawnResult {
  bool already_spawned = false;
  NodeId sub_id;
  std::vector<NodeId> reassigned;
};

// Clones the parent FRS into a SubFRS at the centroid of the reassigned
// robots (ceil(fraction * robots), farthest from the parent first), moves
// those robots over, and duplicates the parent's robot/parent/cloud links for
// the new node. Once per FRS per run.
SpawnResult spawn_sfrs(const NodeId& frs, const SurgeMonitor& monitor, Topology& topo,
                       std::map<NodeId, Position>& positions, std::map<NodeId, NodeId>& assignment,
                       RoutingPolicy& policy, std::map<NodeId, NodeId>& fog_cloud);

enum class HandoverDecision { Keep, Reassign, Uncovered };

struct HandoverResult {
  HandoverDecision decision = HandoverDecision::Keep;
  NodeId target;  // set when decision == Reassign
};

// Re-evaluates a robot's attachment after it moved. Reassigns when the robot
// left the old coverage, or when a covering FRS is nearer than the old one by
// more than hysteresis_m.
HandoverResult handover(const NodeId& robot, const NodeId& old_frs, const Topology& topo,
                        const std::map<NodeId, Position>& positions, double hysteresis_m);

}  // namespace fogsim
