#include "fogsim/engine.hpp"

#include <cstdio>
#include <queue>
#include <sstream>

#include "fogsim/rng.hpp"
#include "fogsim/workload.hpp"

namespace fogsim {

bool Server::enqueue(std::uint64_t request_id) {
  if (busy_ < capacity_) {
    ++busy_;
    return true;
  }
  fifo_.push_back(request_id);
  return false;
}

std::optional<std::uint64_t> Server::finish() {
  --busy_;
  if (fifo_.empty()) return std::nullopt;
  std::uint64_t next = fifo_.front();
  fifo_.pop_front();
  ++busy_;
  return next;
}

namespace {

std::string format_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct RequestState {
  Request req;
  RoutePlan plan;
  std::size_t next_hop = 0;  // hop whose arrival is pending or in progress
  double enqueue_time = 0.0;
  double queue_wait = 0.0;
  bool terminal = false;
  bool completed = false;
  double complete_ms = 0.0;
  std::string drop_reason;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time_ms != b.time_ms) return a.time_ms > b.time_ms;
    return a.seq > b.seq;
  }
};

}  // namespace

std::string Trace::serialize() const {
  std::ostringstream out;
  out << "# seed=" << seed << "\n";
  out << "# config_hash=" << config_hash << "\n";
  out << "# prng=" << prng << "\n";
  for (const auto& rec : records) {
    out << rec.request_id << ',' << format_ms(rec.issue_ms) << ',';
    for (std::size_t i = 0; i < rec.route.size(); ++i) {
      if (i) out << '/';
      out << rec.route[i];
    }
    out << ',';
    if (rec.completed)
      out << format_ms(rec.complete_ms);
    else
      out << "DROPPED:" << rec.drop_reason;
    out << ',' << format_ms(rec.queue_wait_ms) << ',' << rec.hops << "\n";
  }
  return out.str();
}

RunResult run(const Scenario& scenario) {
  {
    auto issues = validate(scenario);
    if (!issues.empty()) {
      std::string joined = "invalid scenario:";
      for (const auto& i : issues) joined += "\n  " + i.field + ": " + i.message;
      throw ConfigError(joined);
    }
  }

  Topology topo;
  std::map<NodeId, Position> positions;
  for (const auto& n : scenario.nodes) {
    topo.nodes[n.id] = n;
    positions[n.id] = n.pos;
  }
  topo.links = scenario.links;

  // Link index for O(log n) hop lookups; kept in sync when a spawn adds links.
  std::map<std::pair<NodeId, NodeId>, LinkSpec> link_index;
  auto index_link = [&](const LinkSpec& l) {
    link_index[{l.a, l.b}] = l;
    link_index[{l.b, l.a}] = l;
  };
  for (const auto& l : topo.links) index_link(l);
  std::size_t indexed_links = topo.links.size();

  std::map<NodeId, NodeId> assignment;
  for (const auto& n : scenario.nodes) {
    if (n.role != Role::Robot) continue;
    auto fog = assign_frs(n.id, topo, positions);
    if (!fog) throw ConfigError("robot " + n.id + " is uncovered at t=0");
    assignment[n.id] = *fog;
  }

  std::map<NodeId, NodeId> fog_cloud;
  for (const auto& [id, spec] : topo.nodes) {
    if (!spec.is_fog()) continue;
    for (const auto& [cid, cspec] : topo.nodes) {  // ascending: lowest cloud id wins
      if (cspec.role == Role::CloudRegion && topo.has_link(id, cid)) {
        fog_cloud[id] = cid;
        break;
      }
    }
  }

  std::map<NodeId, Cache> caches;
  auto keys = scenario.all_keys();
  for (const auto& [id, spec] : topo.nodes) {
    if (!spec.is_fog()) continue;
    Cache c(spec.cache_capacity);
    auto pw = scenario.prewarm.find(id);
    if (pw != scenario.prewarm.end())
      for (const auto& k : pw->second) c.put(k);
    if (scenario.prewarm_all.count(id))
      for (const auto& k : keys) c.put(k);
    caches.emplace(id, std::move(c));
  }

  std::map<NodeId, std::set<std::string>> holdings = scenario.holdings;
  RoutingPolicy policy = scenario.policy;  // mutable: spawns extend adjacency

  std::map<NodeId, Server> servers;
  for (const auto& [id, spec] : topo.nodes)
    if (spec.serves()) servers.emplace(id, Server(spec.parallel_servers, spec.service_time_ms));
  std::map<NodeId, Server> d2d_servers;  // per holder robot, capacity 1

  Rng hop_rng = Rng(scenario.seed).fork(fnv1a64("hop-delay"));

  std::vector<Request> requests = generate_workload(scenario);
  std::vector<RequestState> states(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) states[i].req = requests[i];

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  std::uint64_t next_seq = 0;
  auto schedule = [&](Event ev) {
    ev.seq = next_seq++;
    queue.push(ev);
  };

  for (const auto& r : requests) {
    Event ev;
    ev.time_ms = r.issue_time_ms;
    ev.kind = EventKind::RequestIssued;
    ev.request_id = r.id;
    schedule(ev);
  }
  for (const auto& [robot, wps] : scenario.mobility) {
    for (std::size_t wi = 0; wi < wps.size(); ++wi) {
      Event ev;
      ev.time_ms = wps[wi].t_ms;
      ev.kind = EventKind::RobotMoved;
      ev.node = robot;
      ev.aux = static_cast<int>(wi);
      schedule(ev);
    }
  }
  {
    // Scheduled after all issues, so requests landing exactly on the end
    // time still issue (and finish as in-flight).
    Event ev;
    ev.time_ms = scenario.duration_ms;
    ev.kind = EventKind::SimulationEnd;
    schedule(ev);
  }

  RunResult result;
  result.trace.seed = scenario.seed;
  result.trace.config_hash = config_hash(scenario);
  result.trace.prng = kPrngAlgorithm;

  std::map<NodeId, std::vector<double>> surge_arrivals;
  std::set<NodeId> surge_done;
  std::map<NodeId, int> handover_version;

  auto link_at = [&](const NodeId& from, const NodeId& to) -> const LinkSpec& {
    auto it = link_index.find({from, to});
    if (it == link_index.end())
      throw ConfigError("no link between " + from + " and " + to);
    return it->second;
  };

  auto server_for = [&](const RequestState& st, const NodeId& node) -> Server& {
    if (st.plan.resolution == Resolution::D2d && topo.nodes.at(node).role == Role::Robot) {
      auto it = d2d_servers.find(node);
      if (it == d2d_servers.end())
        it = d2d_servers.emplace(node, Server(1, policy.d2d_internal_lag_ms)).first;
      return it->second;
    }
    return servers.at(node);
  };

  auto schedule_hop = [&](std::uint64_t rid, double now) {
    RequestState& st = states[rid];
    const Hop& hop = st.plan.hops[st.next_hop];
    const LinkSpec& link = link_at(hop.from, hop.to);
    Event ev;
    ev.time_ms = now + hop_delay(link, hop.payload_bytes, hop_rng);
    ev.kind = EventKind::HopArrived;
    ev.request_id = rid;
    ev.node = hop.to;
    schedule(ev);
  };

  auto finalize = [&](std::uint64_t rid, double now) {
    RequestState& st = states[rid];
    st.terminal = true;
    double latency = now - st.req.issue_time_ms;
    bool has_deadline = st.req.deadline_ms > 0;
    if (has_deadline) ++result.deadline_total;
    if (has_deadline && latency > st.req.deadline_ms) {
      st.drop_reason = "deadline";
      ++result.dropped;
    } else {
      st.completed = true;
      st.complete_ms = now;
      ++result.completed;
      if (has_deadline) ++result.deadline_met;
    }
  };

  auto advance = [&](std::uint64_t rid, double now) {
    RequestState& st = states[rid];
    ++st.next_hop;
    if (st.next_hop >= st.plan.hops.size())
      finalize(rid, now);
    else
      schedule_hop(rid, now);
  };

  bool running = true;
  while (running && !queue.empty()) {
    Event ev = queue.top();
    queue.pop();
    double now = ev.time_ms;

    switch (ev.kind) {
      case EventKind::RequestIssued: {
        RequestState& st = states[ev.request_id];
        SystemView view{&topo, &positions, &assignment, &caches, &holdings, &fog_cloud};
        st.plan = plan_route(st.req, view, policy);
        ++result.resolution_counts[resolution_name(st.plan.resolution)];
        st.next_hop = 0;
        schedule_hop(ev.request_id, now);
        break;
      }

      case EventKind::HopArrived: {
        RequestState& st = states[ev.request_id];
        const Hop& hop = st.plan.hops[st.next_hop];
        if (hop.cache_fill_at_dst) {
          auto it = caches.find(hop.to);
          if (it != caches.end()) it->second.put(st.req.data_key);
        }
        if (!hop.serve_at_dst) {
          advance(ev.request_id, now);
          break;
        }
        if (scenario.surge) {
          auto node_it = topo.nodes.find(hop.to);
          if (node_it != topo.nodes.end() && node_it->second.role == Role::Frs &&
              !surge_done.count(hop.to)) {
            auto& arrivals = surge_arrivals[hop.to];
            arrivals.push_back(now);
            if (check_surge(*scenario.surge, arrivals, now)) {
              surge_done.insert(hop.to);
              Event sp;
              sp.time_ms = now;
              sp.kind = EventKind::SfrsSpawned;
              sp.node = hop.to;
              schedule(sp);
            }
          }
        }
        Server& srv = server_for(st, hop.to);
        result.arrival_order[hop.to].push_back(ev.request_id);
        st.enqueue_time = now;
        if (srv.enqueue(ev.request_id)) {
          Event ss;
          ss.time_ms = now;
          ss.kind = EventKind::ServiceStarted;
          ss.request_id = ev.request_id;
          ss.node = hop.to;
          schedule(ss);
        }
        break;
      }

      case EventKind::ServiceStarted: {
        RequestState& st = states[ev.request_id];
        st.queue_wait += now - st.enqueue_time;
        result.service_order[ev.node].push_back(ev.request_id);
        Event fin;
        fin.time_ms = now + server_for(st, ev.node).service_time_ms();
        fin.kind = EventKind::ServiceFinished;
        fin.request_id = ev.request_id;
        fin.node = ev.node;
        schedule(fin);
        break;
      }

      case EventKind::ServiceFinished: {
        RequestState& st = states[ev.request_id];
        Server& srv = server_for(st, ev.node);
        if (auto next = srv.finish()) {
          Event ss;
          ss.time_ms = now;
          ss.kind = EventKind::ServiceStarted;
          ss.request_id = *next;
          ss.node = ev.node;
          schedule(ss);
        }
        advance(ev.request_id, now);
        break;
      }

      case EventKind::RobotMoved: {
        const auto& wp = scenario.mobility.at(ev.node)[static_cast<std::size_t>(ev.aux)];
        positions[ev.node] = wp.pos;
        auto hr = handover(ev.node, assignment.at(ev.node), topo, positions,
                           scenario.handover.hysteresis_m);
        if (hr.decision == HandoverDecision::Reassign) {
          int version = ++handover_version[ev.node];
          Event hc;
          hc.time_ms = now + scenario.handover.delay_ms;
          hc.kind = EventKind::HandoverCompleted;
          hc.node = ev.node;
          hc.node2 = hr.target;
          hc.aux = version;
          schedule(hc);
        }
        // Uncovered: keep the old attachment so requests keep flowing.
        break;
      }

      case EventKind::HandoverCompleted: {
        if (ev.aux == handover_version[ev.node]) assignment[ev.node] = ev.node2;
        break;
      }

      case EventKind::SfrsSpawned: {
        auto res = spawn_sfrs(ev.node, *scenario.surge, topo, positions, assignment, policy,
                              fog_cloud);
        if (!res.already_spawned) {
          for (; indexed_links < topo.links.size(); ++indexed_links)
            index_link(topo.links[indexed_links]);
          const NodeSpec& sub = topo.nodes.at(res.sub_id);
          caches.emplace(res.sub_id, Cache(sub.cache_capacity));
          servers.emplace(res.sub_id, Server(sub.parallel_servers, sub.service_time_ms));
        }
        break;
      }

      case EventKind::SimulationEnd:
        running = false;
        break;
    }
  }

  result.issued = states.size();
  std::map<std::string, std::vector<double>> by_resolution;
  for (const auto& st : states) {
    TraceRecord rec;
    rec.request_id = st.req.id;
    rec.issue_ms = st.req.issue_time_ms;
    rec.route.push_back(st.req.origin);
    for (const auto& h : st.plan.hops) rec.route.push_back(h.to);
    rec.resolution = resolution_name(st.plan.resolution);
    rec.hops = static_cast<int>(st.plan.hops.size());
    rec.queue_wait_ms = st.queue_wait;
    if (st.completed) {
      rec.completed = true;
      rec.complete_ms = st.complete_ms;
      double lat = st.complete_ms - st.req.issue_time_ms;
      result.latencies_ms.push_back(lat);
      by_resolution[rec.resolution].push_back(lat);
    } else if (st.terminal) {
      rec.drop_reason = st.drop_reason;
    } else {
      rec.drop_reason = "in_flight";
      ++result.in_flight;
    }
    result.trace.records.push_back(rec);
  }

  result.overall = summarize(result.latencies_ms, result.issued - result.completed);
  for (auto& [name, lats] : by_resolution) result.per_resolution[name] = summarize(lats);
  result.deadline_met_fraction =
      result.deadline_total == 0
          ? 1.0
          : static_cast<double>(result.deadline_met) / static_cast<double>(result.deadline_total);
  return result;
}

}  // namespace fogsim
