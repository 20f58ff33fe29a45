#include "scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fogsim/rng.hpp"

namespace fogsim::testsupport {

Scenario random_scenario(std::uint64_t seed, const GenSpec& spec) {
  Rng g(seed ^ 0x5C3A7E1D2B9F4680ULL);
  auto u = [&] { return g.uniform01(); };
  auto pick = [&](int n) { return static_cast<int>(g.next_u64() % static_cast<std::uint64_t>(n)); };
  auto chance = [&](double p) { return g.uniform01() < p; };

  Scenario s;
  s.seed = seed * 7919 + 17;
  s.seed_set = true;
  s.duration_ms = 1500.0 + pick(2000);

  auto make_model = [&](double lo, double span) {
    double base = lo + u() * span;
    if (spec.empirical_links && chance(0.4)) {
      double avg = base + 0.2 + u() * span * 0.5;
      double max = avg + (avg - base) * 3.0 + 1.0;
      return LatencyModel::empirical(base, avg, max);
    }
    return LatencyModel::constant(base);
  };
  auto bandwidth = [&] {
    if (chance(0.3)) return 1e5 * std::pow(10.0, u() * 2.0);
    return kUnlimitedBandwidth;
  };

  int nf = 1 + pick(3);
  for (int i = 0; i < nf; ++i) {
    NodeSpec f;
    f.id = "f" + std::to_string(i + 1);
    f.role = Role::Frs;
    f.pos = {100.0 * i, 0.0};
    f.coverage_radius_m = 150.0;
    f.service_time_ms = 1.0 + u() * 9.0;
    f.parallel_servers = 1 + pick(3);
    f.cache_capacity = static_cast<std::size_t>(1 + pick(4));
    s.nodes.push_back(f);
  }

  int nr = 2 + pick(7);
  std::vector<NodeId> robots;
  for (int i = 0; i < nr; ++i) {
    NodeSpec r;
    r.id = "r" + std::to_string(i + 1);
    r.role = Role::Robot;
    r.pos = {-40.0 + u() * (100.0 * (nf - 1) + 80.0), -30.0 + u() * 60.0};
    robots.push_back(r.id);
    s.nodes.push_back(r);
  }

  bool second_cloud = chance(0.3);
  std::vector<NodeId> clouds;
  if (second_cloud) clouds.push_back("c0");
  clouds.push_back("c1");
  for (const auto& cid : clouds) {
    NodeSpec c;
    c.id = cid;
    c.role = Role::CloudRegion;
    c.service_time_ms = 1.0 + u() * 4.0;
    c.parallel_servers = 2 + pick(7);
    s.nodes.push_back(c);
  }

  for (const auto& r : robots)
    for (int i = 0; i < nf; ++i) {
      LinkSpec l;
      l.a = r;
      l.b = "f" + std::to_string(i + 1);
      l.one_way = make_model(0.5, 2.5);
      l.bandwidth_bytes_per_s = bandwidth();
      s.links.push_back(l);
    }
  for (int i = 0; i < nf; ++i)
    for (const auto& cid : clouds) {
      LinkSpec l;
      l.a = "f" + std::to_string(i + 1);
      l.b = cid;
      l.one_way = make_model(20.0, 60.0);
      l.bandwidth_bytes_per_s = bandwidth();
      s.links.push_back(l);
    }
  for (int i = 0; i + 1 < nf; ++i) {
    LinkSpec l;
    l.a = "f" + std::to_string(i + 1);
    l.b = "f" + std::to_string(i + 2);
    l.one_way = make_model(2.0, 6.0);
    l.bandwidth_bytes_per_s = bandwidth();
    s.links.push_back(l);
  }

  int kind = pick(3);
  if (kind == 1) {
    s.policy.kind = PolicyKind::D2d;
    s.policy.d2d_range_m = 40.0 + u() * 120.0;
    s.policy.d2d_internal_lag_ms = u() * 3.0;
    for (std::size_t i = 0; i < robots.size(); ++i)
      for (std::size_t j = i + 1; j < robots.size(); ++j) {
        LinkSpec l;
        l.a = robots[i];
        l.b = robots[j];
        l.one_way = make_model(0.4, 1.6);
        l.bandwidth_bytes_per_s = bandwidth();
        s.links.push_back(l);
      }
  } else if (kind == 2 && nf > 1) {
    s.policy.kind = PolicyKind::MultiFrs;
    for (int i = 0; i + 1 < nf; ++i)
      s.policy.adjacency.push_back({"f" + std::to_string(i + 1), "f" + std::to_string(i + 2)});
  }

  int streams = chance(0.35) ? 2 : 1;
  for (int si = 0; si < streams; ++si) {
    WorkloadStream st;
    st.label = si == 0 ? "" : "aux";
    if (spec.fixed_intervals && chance(0.5)) {
      st.arrival = WorkloadStream::Arrival::FixedInterval;
      st.interval_ms = 40.0 + u() * 400.0;
    } else {
      st.arrival = WorkloadStream::Arrival::Poisson;
      st.rate_rps = 0.8 + u() * 6.0;
    }
    st.key_universe = 2 + pick(5);
    if (chance(0.4)) {
      st.key_dist = WorkloadStream::KeyDist::Hot;
      st.fraction_hot = 0.2 + u() * 0.4;
      st.hot_weight = 0.6 + u() * 0.39;
    }
    st.request_bytes = 50.0 + u() * 450.0;
    st.response_bytes = 200.0 + u() * 30000.0;
    if (chance(0.25)) st.deadline_ms = 30.0 + u() * 300.0;
    if (chance(0.3)) {
      int take = 1 + pick(nr);
      st.robots.assign(robots.begin(), robots.begin() + take);
    }
    s.workload.push_back(st);
  }

  auto keys = s.all_keys();
  auto key_subset = [&] {
    std::vector<std::string> out;
    for (const auto& k : keys)
      if (chance(0.5)) out.push_back(k);
    if (out.empty()) out.push_back(keys[static_cast<std::size_t>(pick(static_cast<int>(keys.size())))]);
    return out;
  };

  if (s.policy.kind == PolicyKind::D2d) {
    int holders = 1 + pick(2);
    for (int i = 0; i < holders && i < nr; ++i) {
      auto sub = key_subset();
      s.holdings[robots[static_cast<std::size_t>(i)]] = {sub.begin(), sub.end()};
    }
  }
  for (int i = 0; i < nf; ++i)
    if (chance(0.5)) s.prewarm["f" + std::to_string(i + 1)] = key_subset();

  if (spec.mobility) {
    for (const auto& r : robots) {
      if (!chance(0.3)) continue;
      int wps = 1 + pick(3);
      std::vector<double> times;
      for (int w = 0; w < wps; ++w) times.push_back(u() * s.duration_ms);
      std::sort(times.begin(), times.end());
      std::vector<MobilityWaypoint> path;
      for (double t : times) {
        MobilityWaypoint wp;
        wp.t_ms = t;
        if (chance(0.1))
          wp.pos = {u() * 100.0, 500.0};  // out of everyone's coverage
        else
          wp.pos = {-40.0 + u() * (100.0 * (nf - 1) + 80.0), -30.0 + u() * 60.0};
        path.push_back(wp);
      }
      s.mobility[r] = path;
    }
  }

  if (spec.surge && chance(0.7)) {
    SurgeMonitor m;
    m.window_ms = 300.0 + u() * 700.0;
    m.threshold_rps = 2.0 + u() * 10.0;
    m.reassignment_fraction = 0.3 + u() * 0.4;
    s.surge = m;
  }

  return s;
}

}  // namespace fogsim::testsupport
