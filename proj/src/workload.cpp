#include "fogsim/workload.hpp"

#include <algorithm>
#include <cmath>

#include "fogsim/rng.hpp"

namespace fogsim {

namespace {

struct Draft {
  double t_ms;
  NodeId robot;
  std::size_t stream;
  std::size_t k;  // emission index within (robot, stream)
  std::string key;
};

std::string draw_key(const WorkloadStream& st, Rng& rng) {
  int universe = st.key_universe;
  if (st.key_dist == WorkloadStream::KeyDist::Uniform) {
    return st.key_name(static_cast<int>(rng.next_u64() % universe));
  }
  int hot = static_cast<int>(std::ceil(st.fraction_hot * universe));
  hot = std::clamp(hot, 1, universe);
  if (hot == universe || rng.uniform01() < st.hot_weight)
    return st.key_name(static_cast<int>(rng.next_u64() % hot));
  return st.key_name(hot + static_cast<int>(rng.next_u64() % (universe - hot)));
}

}  // namespace

std::vector<Request> generate_workload(const Scenario& s) {
  std::vector<NodeId> all_robots;
  for (const auto& n : s.nodes)
    if (n.role == Role::Robot) all_robots.push_back(n.id);
  std::sort(all_robots.begin(), all_robots.end());

  Rng base(s.seed);
  std::vector<Draft> drafts;

  for (std::size_t si = 0; si < s.workload.size(); ++si) {
    const WorkloadStream& st = s.workload[si];
    const std::vector<NodeId>& robots = st.robots.empty() ? all_robots : st.robots;
    for (const NodeId& robot : robots) {
      // Stream keyed by label and index so reordering robots in the config
      // cannot shift anyone's draws.
      Rng rng = base.fork(fnv1a64(robot)).fork(fnv1a64(st.label) + si);
      std::size_t k = 0;
      if (st.arrival == WorkloadStream::Arrival::FixedInterval) {
        for (std::size_t i = 1;; ++i) {
          double t = st.interval_ms * static_cast<double>(i);
          if (t > s.duration_ms) break;
          drafts.push_back({t, robot, si, k++, draw_key(st, rng)});
        }
      } else {
        double mean_gap_ms = 1000.0 / st.rate_rps;
        double t = rng.exponential(mean_gap_ms);
        while (t <= s.duration_ms) {
          drafts.push_back({t, robot, si, k++, draw_key(st, rng)});
          t += rng.exponential(mean_gap_ms);
        }
      }
    }
  }

  std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
    if (a.robot != b.robot) return a.robot < b.robot;
    if (a.stream != b.stream) return a.stream < b.stream;
    return a.k < b.k;
  });

  std::vector<Request> out;
  out.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const Draft& d = drafts[i];
    const WorkloadStream& st = s.workload[d.stream];
    Request r;
    r.id = i;
    r.origin = d.robot;
    r.data_key = d.key;
    r.request_bytes = st.request_bytes;
    r.response_bytes = st.response_bytes;
    r.issue_time_ms = d.t_ms;
    r.deadline_ms = st.deadline_ms;
    out.push_back(r);
  }
  return out;
}

}  // namespace fogsim
