#include "fogsim/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace fogsim {

using nlohmann::json;

std::string WorkloadStream::key_name(int index) const {
  if (label.empty()) return "k" + std::to_string(index);
  return label + "-k" + std::to_string(index);
}

const NodeSpec* Scenario::find_node(const NodeId& id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

std::vector<std::string> Scenario::all_keys() const {
  std::vector<std::string> keys;
  for (const auto& st : workload)
    for (int i = 0; i < st.key_universe; ++i) keys.push_back(st.key_name(i));
  return keys;
}

namespace {

void issue(std::vector<ParseIssue>& issues, const std::string& field, const std::string& msg) {
  issues.push_back({ParseIssue::Kind::Validation, 0, field, msg});
}

bool valid_model(const LatencyModel& m) {
  if (m.kind == LatencyModel::Kind::Constant) return m.min_ms >= 0.0;
  return m.min_ms >= 0.0 && m.min_ms <= m.avg_ms && m.avg_ms <= m.max_ms;
}

}  // namespace

std::vector<ParseIssue> validate(const Scenario& s) {
  std::vector<ParseIssue> issues;

  if (!s.seed_set) issue(issues, "seed", "seed is mandatory for determinism");
  if (s.duration_ms < 0) issue(issues, "duration_ms", "must be >= 0");

  std::map<NodeId, const NodeSpec*> by_id;
  for (const auto& n : s.nodes) {
    std::string f = "nodes[" + n.id + "]";
    if (n.id.empty()) issue(issues, "nodes", "empty node id");
    if (by_id.count(n.id)) issue(issues, f, "duplicate node id " + n.id);
    by_id[n.id] = &n;
    if (n.service_time_ms < 0) issue(issues, f + ".service_time_ms", "must be >= 0");
    if (n.serves() && n.parallel_servers < 1)
      issue(issues, f + ".parallel_servers", "must be >= 1 for serving roles");
    if (n.coverage_radius_m < 0) issue(issues, f + ".coverage_radius_m", "must be >= 0");
  }

  std::set<std::pair<NodeId, NodeId>> seen_links;
  for (const auto& l : s.links) {
    std::string f = "links[" + l.a + "," + l.b + "]";
    if (!by_id.count(l.a)) issue(issues, f, "unknown node " + l.a);
    if (!by_id.count(l.b)) issue(issues, f, "unknown node " + l.b);
    if (l.a == l.b) issue(issues, f, "link endpoints must differ");
    auto key = std::minmax(l.a, l.b);
    if (!seen_links.insert({key.first, key.second}).second)
      issue(issues, f, "duplicate link");
    if (!valid_model(l.one_way)) issue(issues, f + ".one_way", "invalid latency model");
    if (!(l.bandwidth_bytes_per_s > 0))
      issue(issues, f + ".bandwidth_bytes_per_s", "must be positive or unlimited");
  }

  if (s.policy.d2d_range_m < 0) issue(issues, "policy.range_m", "must be >= 0");
  if (s.policy.d2d_internal_lag_ms < 0) issue(issues, "policy.internal_lag_ms", "must be >= 0");
  for (const auto& [a, b] : s.policy.adjacency) {
    std::string f = "policy.adjacency[" + a + "," + b + "]";
    if (a == b) issue(issues, f, "self-adjacency is not allowed");
    for (const auto& id : {a, b}) {
      auto it = by_id.find(id);
      if (it == by_id.end())
        issue(issues, f, "unknown node " + id);
      else if (!it->second->is_fog())
        issue(issues, f, id + " is not an FRS/SubFRS");
    }
  }

  for (std::size_t i = 0; i < s.workload.size(); ++i) {
    const auto& st = s.workload[i];
    std::string f = "workload[" + std::to_string(i) + "]";
    if (st.arrival == WorkloadStream::Arrival::FixedInterval && !(st.interval_ms > 0))
      issue(issues, f + ".fixed_interval_ms", "must be > 0");
    if (st.arrival == WorkloadStream::Arrival::Poisson && !(st.rate_rps > 0))
      issue(issues, f + ".poisson_rate_rps", "must be > 0");
    if (st.key_universe < 1) issue(issues, f + ".key_universe", "must be >= 1");
    if (st.request_bytes < 0 || st.response_bytes < 0)
      issue(issues, f + ".bytes", "sizes must be >= 0");
    if (st.deadline_ms < 0) issue(issues, f + ".deadline_ms", "must be >= 0");
    if (st.key_dist == WorkloadStream::KeyDist::Hot) {
      if (!(st.fraction_hot > 0 && st.fraction_hot <= 1))
        issue(issues, f + ".fraction_hot", "must be in (0, 1]");
      if (!(st.hot_weight >= 0 && st.hot_weight <= 1))
        issue(issues, f + ".hot_weight", "must be in [0, 1]");
    }
    for (const auto& r : st.robots) {
      auto it = by_id.find(r);
      if (it == by_id.end())
        issue(issues, f + ".robots", "unknown node " + r);
      else if (it->second->role != Role::Robot)
        issue(issues, f + ".robots", r + " is not a robot");
    }
  }

  if (s.surge) {
    if (!(s.surge->window_ms > 0)) issue(issues, "surge.window_ms", "must be > 0");
    if (!(s.surge->threshold_rps > 0)) issue(issues, "surge.threshold_rps", "must be > 0");
    if (!(s.surge->reassignment_fraction > 0 && s.surge->reassignment_fraction < 1))
      issue(issues, "surge.reassignment_fraction", "must be in (0, 1)");
  }

  for (const auto& [robot, waypoints] : s.mobility) {
    std::string f = "mobility[" + robot + "]";
    auto it = by_id.find(robot);
    if (it == by_id.end())
      issue(issues, f, "unknown node " + robot);
    else if (it->second->role != Role::Robot)
      issue(issues, f, robot + " is not a robot");
    double prev = -1.0;
    for (const auto& wp : waypoints) {
      if (wp.t_ms < 0) issue(issues, f, "waypoint time must be >= 0");
      if (wp.t_ms < prev) issue(issues, f, "waypoints must be sorted by time");
      prev = wp.t_ms;
    }
  }

  for (const auto& [fog, keys] : s.prewarm) {
    (void)keys;
    auto it = by_id.find(fog);
    if (it == by_id.end() || !it->second->is_fog())
      issue(issues, "nodes[" + fog + "].prewarm", "prewarm requires an FRS/SubFRS");
  }
  for (const auto& fog : s.prewarm_all) {
    auto it = by_id.find(fog);
    if (it == by_id.end() || !it->second->is_fog())
      issue(issues, "nodes[" + fog + "].prewarm_all", "prewarm requires an FRS/SubFRS");
  }
  for (const auto& [robot, keys] : s.holdings) {
    (void)keys;
    auto it = by_id.find(robot);
    if (it == by_id.end() || it->second->role != Role::Robot)
      issue(issues, "nodes[" + robot + "].holds", "holds requires a robot");
  }

  // Structural reachability: every robot coverable at t=0 with an access
  // link, and every fog node that could ever miss has a cloud to fall back
  // on. Checked here so a run can fail before any event executes.
  Topology topo;
  std::map<NodeId, Position> positions;
  for (const auto& n : s.nodes) {
    topo.nodes[n.id] = n;
    positions[n.id] = n.pos;
  }
  topo.links = s.links;

  std::vector<std::string> every_key = s.all_keys();
  std::size_t key_count = every_key.size();
  for (const auto& n : s.nodes) {
    if (n.role == Role::Robot) {
      if (!assign_frs(n.id, topo, positions))
        issue(issues, "nodes[" + n.id + "]",
              "no linked FRS covers this robot at t=0");
    } else if (n.is_fog()) {
      bool has_cloud = false;
      for (const auto& other : s.nodes) {
        if (other.role == Role::CloudRegion && topo.has_link(n.id, other.id)) {
          has_cloud = true;
          break;
        }
      }
      // A cache big enough for the whole key universe, preloaded with all of
      // it, can never evict and so never misses.
      bool preloads_all = s.prewarm_all.count(n.id) > 0;
      if (!preloads_all) {
        auto pw = s.prewarm.find(n.id);
        if (pw != s.prewarm.end()) {
          std::set<std::string> have(pw->second.begin(), pw->second.end());
          preloads_all = std::all_of(every_key.begin(), every_key.end(),
                                     [&](const std::string& k) { return have.count(k) > 0; });
        }
      }
      bool hit_only = preloads_all && n.cache_capacity >= key_count;
      if (!has_cloud && !hit_only)
        issue(issues, "nodes[" + n.id + "]",
              "can miss on some key but has no cloud link");
    }
  }

  return issues;
}

namespace {

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

struct Reader {
  std::vector<ParseIssue>& issues;

  bool expect_object(const json& j, const std::string& field) {
    if (j.is_object()) return true;
    issue(issues, field, "expected an object");
    return false;
  }
  bool expect_array(const json& j, const std::string& field) {
    if (j.is_array()) return true;
    issue(issues, field, "expected an array");
    return false;
  }
  double number(const json& obj, const std::string& key, const std::string& field,
                double fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) issue(issues, field + "." + key, "missing required field");
      return fallback;
    }
    if (!obj[key].is_number()) {
      issue(issues, field + "." + key, "expected a number");
      return fallback;
    }
    return obj[key].get<double>();
  }
  std::string text(const json& obj, const std::string& key, const std::string& field,
                   const std::string& fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) issue(issues, field + "." + key, "missing required field");
      return fallback;
    }
    if (!obj[key].is_string()) {
      issue(issues, field + "." + key, "expected a string");
      return fallback;
    }
    return obj[key].get<std::string>();
  }
  bool flag(const json& obj, const std::string& key, const std::string& field) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_boolean()) {
      issue(issues, field + "." + key, "expected a boolean");
      return false;
    }
    return obj[key].get<bool>();
  }
  Position position(const json& obj, const std::string& field) {
    Position p;
    if (!obj.contains("pos")) return p;
    const json& j = obj["pos"];
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      issue(issues, field + ".pos", "expected [x_m, y_m]");
      return p;
    }
    return {j[0].get<double>(), j[1].get<double>()};
  }
  std::vector<std::string> strings(const json& obj, const std::string& key,
                                   const std::string& field) {
    std::vector<std::string> out;
    if (!obj.contains(key)) return out;
    const json& j = obj[key];
    if (!j.is_array()) {
      issue(issues, field + "." + key, "expected an array of strings");
      return out;
    }
    for (const auto& e : j) {
      if (!e.is_string()) {
        issue(issues, field + "." + key, "expected an array of strings");
        return out;
      }
      out.push_back(e.get<std::string>());
    }
    return out;
  }
};

LatencyModel parse_link_model(const json& obj, const std::string& field, Reader& r) {
  if (obj.contains("one_way_ms")) {
    double ms = r.number(obj, "one_way_ms", field, 0.0);
    return LatencyModel{LatencyModel::Kind::Constant, ms, ms, ms};
  }
  if (obj.contains("one_way")) {
    const json& m = obj["one_way"];
    if (!m.is_object()) {
      issue(r.issues, field + ".one_way", "expected an object with min/avg/max");
      return LatencyModel{};
    }
    LatencyModel out;
    out.kind = LatencyModel::Kind::Empirical;
    out.min_ms = r.number(m, "min_ms", field + ".one_way", 0.0, true);
    out.avg_ms = r.number(m, "avg_ms", field + ".one_way", 0.0, true);
    out.max_ms = r.number(m, "max_ms", field + ".one_way", 0.0, true);
    return out;
  }
  issue(r.issues, field, "link needs one_way_ms or one_way");
  return LatencyModel{};
}

WorkloadStream parse_stream(const json& j, const std::string& field, Reader& r) {
  WorkloadStream st;
  st.label = r.text(j, "label", field, "");
  if (j.contains("arrival") && j["arrival"].is_object()) {
    const json& a = j["arrival"];
    if (a.contains("fixed_interval_ms")) {
      st.arrival = WorkloadStream::Arrival::FixedInterval;
      st.interval_ms = r.number(a, "fixed_interval_ms", field + ".arrival", 1000.0);
    } else if (a.contains("poisson_rate_rps")) {
      st.arrival = WorkloadStream::Arrival::Poisson;
      st.rate_rps = r.number(a, "poisson_rate_rps", field + ".arrival", 1.0);
    } else {
      issue(r.issues, field + ".arrival", "needs fixed_interval_ms or poisson_rate_rps");
    }
  } else {
    issue(r.issues, field + ".arrival", "missing required field");
  }
  st.key_universe = static_cast<int>(r.number(j, "key_universe", field, 1));
  if (j.contains("key_distribution")) {
    const json& kd = j["key_distribution"];
    if (kd.is_string() && kd.get<std::string>() == "uniform") {
      st.key_dist = WorkloadStream::KeyDist::Uniform;
    } else if (kd.is_object() && kd.contains("hot") && kd["hot"].is_object()) {
      st.key_dist = WorkloadStream::KeyDist::Hot;
      st.fraction_hot = r.number(kd["hot"], "fraction_hot", field + ".key_distribution", 0.25);
      st.hot_weight = r.number(kd["hot"], "hot_weight", field + ".key_distribution", 0.9);
    } else {
      issue(r.issues, field + ".key_distribution", "expected \"uniform\" or {\"hot\": {...}}");
    }
  }
  st.request_bytes = r.number(j, "request_bytes", field, 64.0);
  st.response_bytes = r.number(j, "response_bytes", field, 256.0);
  st.deadline_ms = r.number(j, "deadline_ms", field, 0.0);
  st.robots = r.strings(j, "robots", field);
  return st;
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    result.issues.push_back({ParseIssue::Kind::Syntax, line_of_offset(text, e.byte),
                             "", e.what()});
    return result;
  }

  Scenario s;
  Reader r{result.issues};
  if (!r.expect_object(root, "config")) return result;

  if (root.contains("seed")) {
    if (root["seed"].is_number_unsigned() || root["seed"].is_number_integer()) {
      s.seed = root["seed"].get<std::uint64_t>();
      s.seed_set = true;
    } else {
      issue(result.issues, "seed", "expected an unsigned integer");
    }
  }
  s.duration_ms = r.number(root, "duration_ms", "config", 0.0, true);

  if (root.contains("handover") && r.expect_object(root["handover"], "handover")) {
    s.handover.hysteresis_m = r.number(root["handover"], "hysteresis_m", "handover", 5.0);
    s.handover.delay_ms = r.number(root["handover"], "delay_ms", "handover", 50.0);
  }

  if (root.contains("policy") && r.expect_object(root["policy"], "policy")) {
    const json& p = root["policy"];
    std::string kind = r.text(p, "kind", "policy", "basic", true);
    if (kind == "basic") {
      s.policy.kind = PolicyKind::FrsOnly;
    } else if (kind == "d2d") {
      s.policy.kind = PolicyKind::D2d;
      s.policy.d2d_range_m = r.number(p, "range_m", "policy", 0.0, true);
      s.policy.d2d_internal_lag_ms = r.number(p, "internal_lag_ms", "policy", 0.0);
    } else if (kind == "multi") {
      s.policy.kind = PolicyKind::MultiFrs;
      if (p.contains("adjacency") && r.expect_array(p["adjacency"], "policy.adjacency")) {
        for (const auto& pair : p["adjacency"]) {
          if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
              !pair[1].is_string()) {
            issue(result.issues, "policy.adjacency", "expected pairs of node ids");
            continue;
          }
          s.policy.adjacency.emplace_back(pair[0].get<std::string>(),
                                          pair[1].get<std::string>());
        }
      }
    } else {
      issue(result.issues, "policy.kind", "expected basic, d2d, or multi");
    }
  } else {
    issue(result.issues, "policy", "missing required field");
  }

  if (root.contains("nodes") && r.expect_array(root["nodes"], "nodes")) {
    for (const auto& jn : root["nodes"]) {
      if (!jn.is_object()) {
        issue(result.issues, "nodes", "expected node objects");
        continue;
      }
      NodeSpec n;
      n.id = r.text(jn, "id", "nodes[]", "", true);
      std::string f = "nodes[" + n.id + "]";
      std::string role = r.text(jn, "role", f, "robot", true);
      if (role == "robot")
        n.role = Role::Robot;
      else if (role == "frs")
        n.role = Role::Frs;
      else if (role == "sub_frs")
        n.role = Role::SubFrs;
      else if (role == "cloud_region")
        n.role = Role::CloudRegion;
      else
        issue(result.issues, f + ".role", "expected robot, frs, sub_frs, or cloud_region");
      n.pos = r.position(jn, f);
      n.coverage_radius_m = r.number(jn, "coverage_radius_m", f, 0.0);
      n.service_time_ms = r.number(jn, "service_time_ms", f, 0.0);
      n.parallel_servers = static_cast<int>(r.number(jn, "parallel_servers", f, 1));
      n.cache_capacity = static_cast<std::size_t>(
          std::max(0.0, r.number(jn, "cache_capacity", f, 0.0)));
      // Fields that do not apply to a role are normalized away so
      // serialize/parse round trips are exact.
      if (!n.serves()) {
        n.service_time_ms = 0.0;
        n.parallel_servers = 1;
      }
      if (!n.is_fog()) {
        n.coverage_radius_m = 0.0;
        n.cache_capacity = 0;
      }
      auto prewarm = r.strings(jn, "prewarm", f);
      if (!prewarm.empty()) s.prewarm[n.id] = prewarm;
      if (r.flag(jn, "prewarm_all", f)) s.prewarm_all.insert(n.id);
      auto holds = r.strings(jn, "holds", f);
      if (!holds.empty()) s.holdings[n.id] = {holds.begin(), holds.end()};
      s.nodes.push_back(n);
    }
  } else {
    issue(result.issues, "nodes", "missing required field");
  }

  if (root.contains("links") && r.expect_array(root["links"], "links")) {
    for (const auto& jl : root["links"]) {
      if (!jl.is_object()) {
        issue(result.issues, "links", "expected link objects");
        continue;
      }
      LinkSpec l;
      l.a = r.text(jl, "a", "links[]", "", true);
      l.b = r.text(jl, "b", "links[]", "", true);
      std::string f = "links[" + l.a + "," + l.b + "]";
      l.one_way = parse_link_model(jl, f, r);
      if (jl.contains("bandwidth_bytes_per_s")) {
        const json& bw = jl["bandwidth_bytes_per_s"];
        if (bw.is_string() && bw.get<std::string>() == "unlimited")
          l.bandwidth_bytes_per_s = kUnlimitedBandwidth;
        else if (bw.is_number())
          l.bandwidth_bytes_per_s = bw.get<double>();
        else
          issue(result.issues, f + ".bandwidth_bytes_per_s",
                "expected a number or \"unlimited\"");
      }
      s.links.push_back(l);
    }
  } else {
    issue(result.issues, "links", "missing required field");
  }

  if (root.contains("workload")) {
    const json& w = root["workload"];
    if (w.is_object()) {
      s.workload.push_back(parse_stream(w, "workload", r));
    } else if (w.is_array()) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (!w[i].is_object()) {
          issue(result.issues, "workload[" + std::to_string(i) + "]", "expected an object");
          continue;
        }
        s.workload.push_back(parse_stream(w[i], "workload[" + std::to_string(i) + "]", r));
      }
    } else {
      issue(result.issues, "workload", "expected an object or array");
    }
  } else {
    issue(result.issues, "workload", "missing required field");
  }

  if (root.contains("surge") && r.expect_object(root["surge"], "surge")) {
    SurgeMonitor m;
    m.window_ms = r.number(root["surge"], "window_ms", "surge", 1000.0, true);
    m.threshold_rps = r.number(root["surge"], "threshold_rps", "surge", 10.0, true);
    m.reassignment_fraction =
        r.number(root["surge"], "reassignment_fraction", "surge", 0.5, true);
    s.surge = m;
  }

  if (root.contains("mobility") && r.expect_object(root["mobility"], "mobility")) {
    for (const auto& [robot, jw] : root["mobility"].items()) {
      std::string f = "mobility[" + robot + "]";
      if (!jw.is_array()) {
        issue(result.issues, f, "expected an array of waypoints");
        continue;
      }
      std::vector<MobilityWaypoint> wps;
      for (const auto& jp : jw) {
        if (!jp.is_object()) {
          issue(result.issues, f, "expected waypoint objects");
          continue;
        }
        MobilityWaypoint wp;
        wp.t_ms = r.number(jp, "t_ms", f, 0.0, true);
        wp.pos = r.position(jp, f);
        wps.push_back(wp);
      }
      s.mobility[robot] = wps;
    }
  }

  auto validation = validate(s);
  result.issues.insert(result.issues.end(), validation.begin(), validation.end());
  if (result.issues.empty()) result.scenario = s;
  return result;
}

namespace {

json model_to_json(const LatencyModel& m) {
  if (m.kind == LatencyModel::Kind::Constant) return m.min_ms;
  return json{{"min_ms", m.min_ms}, {"avg_ms", m.avg_ms}, {"max_ms", m.max_ms}};
}

}  // namespace

std::string serialize(const Scenario& s) {
  json root;
  root["seed"] = s.seed;
  root["duration_ms"] = s.duration_ms;
  root["handover"] = {{"hysteresis_m", s.handover.hysteresis_m},
                      {"delay_ms", s.handover.delay_ms}};

  json policy;
  policy["kind"] = policy_kind_name(s.policy.kind);
  if (s.policy.kind == PolicyKind::D2d) {
    policy["range_m"] = s.policy.d2d_range_m;
    policy["internal_lag_ms"] = s.policy.d2d_internal_lag_ms;
  } else if (s.policy.kind == PolicyKind::MultiFrs) {
    json adj = json::array();
    for (const auto& [a, b] : s.policy.adjacency) adj.push_back(json::array({a, b}));
    policy["adjacency"] = adj;
  }
  root["policy"] = policy;

  json nodes = json::array();
  for (const auto& n : s.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["role"] = role_name(n.role);
    jn["pos"] = json::array({n.pos.x_m, n.pos.y_m});
    if (n.is_fog()) jn["coverage_radius_m"] = n.coverage_radius_m;
    if (n.serves()) {
      jn["service_time_ms"] = n.service_time_ms;
      jn["parallel_servers"] = n.parallel_servers;
    }
    if (n.is_fog()) jn["cache_capacity"] = n.cache_capacity;
    auto pw = s.prewarm.find(n.id);
    if (pw != s.prewarm.end()) jn["prewarm"] = pw->second;
    if (s.prewarm_all.count(n.id)) jn["prewarm_all"] = true;
    auto hd = s.holdings.find(n.id);
    if (hd != s.holdings.end())
      jn["holds"] = std::vector<std::string>{hd->second.begin(), hd->second.end()};
    nodes.push_back(jn);
  }
  root["nodes"] = nodes;

  json links = json::array();
  for (const auto& l : s.links) {
    json jl;
    jl["a"] = l.a;
    jl["b"] = l.b;
    if (l.one_way.is_constant())
      jl["one_way_ms"] = l.one_way.min_ms;
    else
      jl["one_way"] = model_to_json(l.one_way);
    if (l.bandwidth_bytes_per_s != kUnlimitedBandwidth)
      jl["bandwidth_bytes_per_s"] = l.bandwidth_bytes_per_s;
    links.push_back(jl);
  }
  root["links"] = links;

  json streams = json::array();
  for (const auto& st : s.workload) {
    json js;
    if (!st.label.empty()) js["label"] = st.label;
    if (st.arrival == WorkloadStream::Arrival::FixedInterval)
      js["arrival"] = {{"fixed_interval_ms", st.interval_ms}};
    else
      js["arrival"] = {{"poisson_rate_rps", st.rate_rps}};
    js["key_universe"] = st.key_universe;
    if (st.key_dist == WorkloadStream::KeyDist::Uniform)
      js["key_distribution"] = "uniform";
    else
      js["key_distribution"] = {
          {"hot", {{"fraction_hot", st.fraction_hot}, {"hot_weight", st.hot_weight}}}};
    js["request_bytes"] = st.request_bytes;
    js["response_bytes"] = st.response_bytes;
    if (st.deadline_ms > 0) js["deadline_ms"] = st.deadline_ms;
    if (!st.robots.empty()) js["robots"] = st.robots;
    streams.push_back(js);
  }
  root["workload"] = streams;

  if (s.surge) {
    root["surge"] = {{"window_ms", s.surge->window_ms},
                     {"threshold_rps", s.surge->threshold_rps},
                     {"reassignment_fraction", s.surge->reassignment_fraction}};
  }
  if (!s.mobility.empty()) {
    json jm;
    for (const auto& [robot, wps] : s.mobility) {
      json arr = json::array();
      for (const auto& wp : wps)
        arr.push_back({{"t_ms", wp.t_ms}, {"pos", json::array({wp.pos.x_m, wp.pos.y_m})}});
      jm[robot] = arr;
    }
    root["mobility"] = jm;
  }

  return root.dump(2) + "\n";
}

std::string config_hash(const Scenario& s) {
  std::uint64_t h = fnv1a64(serialize(s));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fogsim
