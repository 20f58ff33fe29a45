#include "fogsim/routing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fogsim {

const LinkSpec* Topology::find_link(const NodeId& a, const NodeId& b) const {
  for (const auto& l : links) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return &l;
  }
  return nullptr;
}

const char* policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::FrsOnly:
      return "basic";
    case PolicyKind::D2d:
      return "d2d";
    case PolicyKind::MultiFrs:
      return "multi";
  }
  return "unknown";
}

bool RoutingPolicy::adjacent(const NodeId& x, const NodeId& y) const {
  for (const auto& [a, b] : adjacency) {
    if ((a == x && b == y) || (a == y && b == x)) return true;
  }
  return false;
}

std::vector<NodeId> RoutingPolicy::neighbors(const NodeId& x) const {
  std::vector<NodeId> out;
  for (const auto& [a, b] : adjacency) {
    if (a == x) out.push_back(b);
    if (b == x) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const char* resolution_name(Resolution r) {
  switch (r) {
    case Resolution::FrsCacheHit:
      return "frs_cache_hit";
    case Resolution::AdjacentFrsHit:
      return "adjacent_frs_hit";
    case Resolution::CloudFetch:
      return "cloud_fetch";
    case Resolution::D2d:
      return "d2d";
  }
  return "unknown";
}

std::optional<NodeId> assign_frs(const NodeId& robot, const Topology& topo,
                                 const std::map<NodeId, Position>& positions) {
  auto rp = positions.find(robot);
  if (rp == positions.end()) return std::nullopt;

  std::optional<NodeId> best;
  double best_dist = 0.0;
  for (const auto& [id, spec] : topo.nodes) {  // ascending id: ties keep the lowest
    if (!spec.is_fog()) continue;
    auto fp = positions.find(id);
    if (fp == positions.end()) continue;
    double d = distance_m(rp->second, fp->second);
    if (d > spec.coverage_radius_m) continue;
    if (!topo.has_link(robot, id)) continue;  // coverage without a link is unreachable
    if (!best || d < best_dist) {
      best = id;
      best_dist = d;
    }
  }
  return best;
}

namespace {

RoutePlan plan_frs_path(const Request& req, const SystemView& view, const RoutingPolicy& policy,
                        const NodeId& frs) {
  RoutePlan plan;
  Cache& local = view.caches->at(frs);

  if (local.get(req.data_key)) {
    plan.resolution = Resolution::FrsCacheHit;
    plan.hops = {
        {req.origin, frs, req.request_bytes, true, false},
        {frs, req.origin, req.response_bytes, false, false},
    };
    plan.serving_nodes = {frs};
    return plan;
  }

  if (policy.kind == PolicyKind::MultiFrs) {
    for (const NodeId& adj : policy.neighbors(frs)) {
      auto it = view.caches->find(adj);
      if (it == view.caches->end()) continue;
      if (!it->second.contains(req.data_key)) continue;
      if (!view.topo->has_link(frs, adj)) continue;
      it->second.get(req.data_key);  // hit at the neighbor: touch its recency
      plan.resolution = Resolution::AdjacentFrsHit;
      plan.hops = {
          {req.origin, frs, req.request_bytes, true, false},
          {frs, adj, req.request_bytes, true, false},
          {adj, frs, req.response_bytes, false, true},
          {frs, req.origin, req.response_bytes, false, false},
      };
      plan.serving_nodes = {frs, adj};
      return plan;
    }
  }

  auto cloud_it = view.fog_cloud->find(frs);
  if (cloud_it == view.fog_cloud->end())
    throw ConfigError("node " + frs + " misses on key " + req.data_key +
                      " but has no cloud link");
  const NodeId& cloud = cloud_it->second;
  plan.resolution = Resolution::CloudFetch;
  plan.hops = {
      {req.origin, frs, req.request_bytes, true, false},
      {frs, cloud, req.request_bytes, true, false},
      {cloud, frs, req.response_bytes, false, true},
      {frs, req.origin, req.response_bytes, false, false},
  };
  plan.serving_nodes = {frs, cloud};
  return plan;
}

}  // namespace

RoutePlan plan_route(const Request& req, const SystemView& view, const RoutingPolicy& policy) {
  auto assigned = view.assignment->find(req.origin);
  if (assigned == view.assignment->end())
    throw ConfigError("robot " + req.origin + " has no assigned serving node");

  if (policy.kind == PolicyKind::D2d) {
    const Position& origin_pos = view.positions->at(req.origin);
    std::optional<NodeId> peer;
    double peer_dist = 0.0;
    for (const auto& [id, spec] : view.topo->nodes) {  // ascending: ties -> lowest id
      if (spec.role != Role::Robot || id == req.origin) continue;
      auto held = view.holdings->find(id);
      if (held == view.holdings->end() || held->second.count(req.data_key) == 0) continue;
      auto pos = view.positions->find(id);
      if (pos == view.positions->end()) continue;
      double d = distance_m(origin_pos, pos->second);
      if (d > policy.d2d_range_m) continue;
      if (!view.topo->has_link(req.origin, id)) continue;
      if (!peer || d < peer_dist) {
        peer = id;
        peer_dist = d;
      }
    }
    if (peer) {
      RoutePlan plan;
      plan.resolution = Resolution::D2d;
      plan.hops = {
          {req.origin, *peer, req.request_bytes, true, false},
          {*peer, req.origin, req.response_bytes, false, false},
      };
      plan.serving_nodes = {*peer};
      return plan;
    }
  }

  return plan_frs_path(req, view, policy, assigned->second);
}

bool check_surge(const SurgeMonitor& monitor, const std::vector<double>& arrivals_ms,
                 double now_ms) {
  std::size_t count = 0;
  for (double t : arrivals_ms) {
    if (t > now_ms - monitor.window_ms && t <= now_ms) ++count;
  }
  double rps = static_cast<double>(count) / (monitor.window_ms / 1000.0);
  return rps > monitor.threshold_rps;
}

SpawnResult spawn_sfrs(const NodeId& frs, const SurgeMonitor& monitor, Topology& topo,
                       std::map<NodeId, Position>& positions, std::map<NodeId, NodeId>& assignment,
                       RoutingPolicy& policy, std::map<NodeId, NodeId>& fog_cloud) {
  SpawnResult result;
  result.sub_id = frs + "-sub";
  if (topo.nodes.count(result.sub_id)) {
    result.already_spawned = true;
    return result;
  }
  const NodeSpec& parent = topo.nodes.at(frs);
  const Position parent_pos = positions.at(frs);

  std::vector<NodeId> robots;
  for (const auto& [robot, fog] : assignment) {
    if (fog == frs) robots.push_back(robot);
  }
  // Farthest from the parent first; id breaks distance ties.
  std::sort(robots.begin(), robots.end(), [&](const NodeId& x, const NodeId& y) {
    double dx = distance_m(positions.at(x), parent_pos);
    double dy = distance_m(positions.at(y), parent_pos);
    if (dx != dy) return dx > dy;
    return x < y;
  });
  auto take = static_cast<std::size_t>(
      std::ceil(monitor.reassignment_fraction * static_cast<double>(robots.size())));
  robots.resize(std::min(take, robots.size()));
  result.reassigned = robots;

  Position centroid = parent_pos;
  if (!robots.empty()) {
    centroid = {0.0, 0.0};
    for (const auto& r : robots) {
      centroid.x_m += positions.at(r).x_m;
      centroid.y_m += positions.at(r).y_m;
    }
    centroid.x_m /= static_cast<double>(robots.size());
    centroid.y_m /= static_cast<double>(robots.size());
  }

  NodeSpec sub = parent;
  sub.id = result.sub_id;
  sub.role = Role::SubFrs;
  sub.pos = centroid;
  topo.nodes[sub.id] = sub;
  positions[sub.id] = centroid;

  // Access links move with the robots; the backhaul reuses the first moved
  // robot's access model, and the cloud link mirrors the parent's.
  for (const auto& r : robots) {
    if (const LinkSpec* l = topo.find_link(r, frs)) {
      LinkSpec nl = *l;
      nl.a = r;
      nl.b = sub.id;
      topo.links.push_back(nl);
    }
    assignment[r] = sub.id;
  }
  LinkSpec backhaul{sub.id, frs, LatencyModel::constant(0.0), kUnlimitedBandwidth};
  if (!robots.empty()) {
    if (const LinkSpec* l = topo.find_link(robots.front(), frs)) {
      backhaul.one_way = l->one_way;
      backhaul.bandwidth_bytes_per_s = l->bandwidth_bytes_per_s;
    }
  }
  topo.links.push_back(backhaul);

  auto cloud_it = fog_cloud.find(frs);
  if (cloud_it != fog_cloud.end()) {
    if (const LinkSpec* l = topo.find_link(frs, cloud_it->second)) {
      LinkSpec nl = *l;
      nl.a = sub.id;
      nl.b = cloud_it->second;
      topo.links.push_back(nl);
    }
    fog_cloud[sub.id] = cloud_it->second;
  }

  if (policy.kind == PolicyKind::MultiFrs) policy.adjacency.emplace_back(sub.id, frs);
  return result;
}

HandoverResult handover(const NodeId& robot, const NodeId& old_frs, const Topology& topo,
                        const std::map<NodeId, Position>& positions, double hysteresis_m) {
  auto best = assign_frs(robot, topo, positions);
  if (!best) return {HandoverDecision::Uncovered, {}};

  bool old_covers = false;
  double old_dist = 0.0;
  auto old_node = topo.nodes.find(old_frs);
  if (old_node != topo.nodes.end() && positions.count(old_frs)) {
    old_dist = distance_m(positions.at(robot), positions.at(old_frs));
    old_covers = old_dist <= old_node->second.coverage_radius_m;
  }
  if (!old_covers) return {HandoverDecision::Reassign, *best};
  if (*best == old_frs) return {HandoverDecision::Keep, {}};

  double best_dist = distance_m(positions.at(robot), positions.at(*best));
  if (old_dist - best_dist > hysteresis_m) return {HandoverDecision::Reassign, *best};
  return {HandoverDecision::Keep, {}};
}

}  // namespace fogsim
