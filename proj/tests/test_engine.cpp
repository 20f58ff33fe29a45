#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fogsim/engine.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/workload.hpp"

using namespace fogsim;

namespace {

Scenario parsed(const std::string& text) {
  ParseResult r = parse_config(text);
  std::string joined;
  for (const auto& i : r.issues) joined += i.field + ": " + i.message + "; ";
  REQUIRE_MESSAGE(r.issues.empty(), joined);
  return *r.scenario;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// One FRS, one server slot, two robots issuing simultaneously: the second
// request waits a full 5ms service behind the first.
const char* kContention = R"json({
  "seed": 7, "duration_ms": 1999, "policy": {"kind": "basic"},
  "nodes": [
    {"id": "r1", "role": "robot", "pos": [0, 0]},
    {"id": "r2", "role": "robot", "pos": [0, 0]},
    {"id": "f1", "role": "frs", "pos": [0, 0], "coverage_radius_m": 10,
     "service_time_ms": 5, "parallel_servers": 1, "cache_capacity": 1,
     "prewarm_all": true}
  ],
  "links": [
    {"a": "r1", "b": "f1", "one_way_ms": 1.0},
    {"a": "r2", "b": "f1", "one_way_ms": 1.0}
  ],
  "workload": {"arrival": {"fixed_interval_ms": 1000}, "key_universe": 1}
})json";

// Cold FRS in front of a cloud region: first request fetches and fills,
// second hits locally.
const char* kReadThrough = R"json({
  "seed": 3, "duration_ms": 2500, "policy": {"kind": "basic"},
  "nodes": [
    {"id": "r1", "role": "robot", "pos": [0, 0]},
    {"id": "f1", "role": "frs", "pos": [0, 0], "coverage_radius_m": 10,
     "service_time_ms": 5, "parallel_servers": 1, "cache_capacity": 1},
    {"id": "c1", "role": "cloud_region", "service_time_ms": 3, "parallel_servers": 8}
  ],
  "links": [
    {"a": "r1", "b": "f1", "one_way_ms": 1.0},
    {"a": "f1", "b": "c1", "one_way_ms": 50.0}
  ],
  "workload": {"arrival": {"fixed_interval_ms": 1000}, "key_universe": 1}
})json";

}  // namespace

TEST_CASE("server seats requests up to capacity and promotes in FIFO order") {
  Server s(2, 5.0);
  CHECK(s.enqueue(1));
  CHECK(s.enqueue(2));
  CHECK_FALSE(s.enqueue(3));
  CHECK_FALSE(s.enqueue(4));
  CHECK(s.busy() == 2);
  CHECK(s.queue().size() == 2);

  auto p = s.finish();
  REQUIRE(p.has_value());
  CHECK(*p == 3);
  CHECK(s.busy() == 2);
  p = s.finish();
  REQUIRE(*p == 4);
  CHECK_FALSE(s.finish().has_value());
  CHECK(s.busy() == 1);
  CHECK_FALSE(s.finish().has_value());
  CHECK(s.busy() == 0);
}

TEST_CASE("simultaneous arrivals queue FIFO at a single-server FRS") {
  RunResult r = run(parsed(kContention));

  REQUIRE(r.issued == 2);
  REQUIRE(r.completed == 2);
  CHECK(r.latencies_ms[0] == 7.0);   // 1 + 5 + 1
  CHECK(r.latencies_ms[1] == 12.0);  // 1 + (wait 5) + 5 + 1
  CHECK(r.trace.records[0].queue_wait_ms == 0.0);
  CHECK(r.trace.records[1].queue_wait_ms == 5.0);
  CHECK(r.overall.mean_ms == 9.5);
  CHECK(r.overall.min_ms == 7.0);
  CHECK(r.overall.max_ms == 12.0);
  CHECK(r.per_resolution.at("frs_cache_hit").count == 2);
  CHECK(r.resolution_counts.at("frs_cache_hit") == 2);
  CHECK(r.deadline_met_fraction == 1.0);

  // FIFO audit on the serving node.
  CHECK(r.arrival_order.at("f1") == std::vector<std::uint64_t>{0, 1});
  CHECK(r.service_order.at("f1") == std::vector<std::uint64_t>{0, 1});
}

TEST_CASE("trace serializes with metadata headers and fixed-point times") {
  RunResult r = run(parsed(kContention));
  auto lines = lines_of(r.trace.serialize());
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "# seed=7");
  CHECK(lines[1].rfind("# config_hash=", 0) == 0);
  CHECK(lines[1].size() == 14 + 16);
  CHECK(lines[2] == "# prng=xoshiro256++");
  CHECK(lines[3] == "0,1000.000000,r1/f1/r1,1007.000000,0.000000,2");
  CHECK(lines[4] == "1,1000.000000,r2/f1/r2,1012.000000,5.000000,2");
}

TEST_CASE("cloud miss fills the cache and later requests hit") {
  RunResult r = run(parsed(kReadThrough));

  REQUIRE(r.completed == 2);
  // 1 + 5 + 50 + 3 + 50 + 1 for the fetch, 1 + 5 + 1 once cached.
  CHECK(r.latencies_ms[0] == 110.0);
  CHECK(r.latencies_ms[1] == 7.0);
  CHECK(r.trace.records[0].resolution == "cloud_fetch");
  CHECK(r.trace.records[1].resolution == "frs_cache_hit");
  CHECK(r.trace.records[0].route ==
        std::vector<NodeId>{"r1", "f1", "c1", "f1", "r1"});
  CHECK(r.trace.records[0].hops == 4);
  CHECK(r.trace.records[1].route == std::vector<NodeId>{"r1", "f1", "r1"});
  CHECK(r.per_resolution.at("cloud_fetch").count == 1);
  CHECK(r.per_resolution.at("frs_cache_hit").count == 1);
}

TEST_CASE("deadline expiry drops at completion time") {
  std::string text = kReadThrough;
  auto at = text.find("\"key_universe\": 1");
  text.replace(at, 17, "\"key_universe\": 1, \"deadline_ms\": 60");
  RunResult r = run(parsed(text));

  CHECK(r.issued == 2);
  CHECK(r.completed == 1);
  CHECK(r.dropped == 1);
  CHECK(r.deadline_total == 2);
  CHECK(r.deadline_met == 1);
  CHECK(r.deadline_met_fraction == 0.5);
  CHECK_FALSE(r.trace.records[0].completed);
  CHECK(r.trace.records[0].drop_reason == "deadline");
  CHECK(r.trace.records[1].completed);
  CHECK(r.overall.count == 1);
  CHECK(r.overall.lost == 1);
  CHECK(r.trace.serialize().find("DROPPED:deadline") != std::string::npos);
}

TEST_CASE("requests unresolved at the end of the run are in_flight") {
  std::string text = kContention;
  auto at = text.find("\"duration_ms\": 1999");
  text.replace(at, 19, "\"duration_ms\": 1000");
  RunResult r = run(parsed(text));

  CHECK(r.issued == 2);  // issues at t=1000 still happen
  CHECK(r.completed == 0);
  CHECK(r.in_flight == 2);
  CHECK(r.resolution_counts.at("frs_cache_hit") == 2);  // planned at issue
  CHECK(r.overall.count == 0);
  CHECK(r.overall.lost == 2);
  CHECK(r.trace.serialize().find("DROPPED:in_flight") != std::string::npos);
}

TEST_CASE("empty workload runs to completion with zero requests") {
  std::string text = kContention;
  auto at = text.find("\"fixed_interval_ms\": 1000");
  text.replace(at, 25, "\"fixed_interval_ms\": 5000");
  RunResult r = run(parsed(text));
  CHECK(r.issued == 0);
  CHECK(r.completed == 0);
  CHECK(r.overall.count == 0);
  CHECK_FALSE(r.overall.has_values());
}

TEST_CASE("invalid scenarios throw before any event executes") {
  Scenario s;  // no seed, no nodes
  CHECK_THROWS_AS(run(s), ConfigError);
  try {
    run(s);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }
}

TEST_CASE("d2d exchanges serialize one at a time at the holder") {
  const char* text = R"json({
    "seed": 11, "duration_ms": 1000,
    "policy": {"kind": "d2d", "range_m": 100, "internal_lag_ms": 2},
    "nodes": [
      {"id": "r1", "role": "robot", "pos": [0, 0], "holds": ["k0"]},
      {"id": "r2", "role": "robot", "pos": [5, 0]},
      {"id": "r3", "role": "robot", "pos": [10, 0]},
      {"id": "f1", "role": "frs", "pos": [0, 0], "coverage_radius_m": 100,
       "service_time_ms": 5, "cache_capacity": 1, "prewarm_all": true}
    ],
    "links": [
      {"a": "r1", "b": "f1", "one_way_ms": 1.0},
      {"a": "r2", "b": "f1", "one_way_ms": 1.0},
      {"a": "r3", "b": "f1", "one_way_ms": 1.0},
      {"a": "r2", "b": "r1", "one_way_ms": 1.0},
      {"a": "r3", "b": "r1", "one_way_ms": 1.0}
    ],
    "workload": {"arrival": {"fixed_interval_ms": 200}, "key_universe": 1,
                 "robots": ["r2", "r3"]}
  })json";
  RunResult r = run(parsed(text));

  // Five ticks per robot; the tick at t=1000 ends in flight.
  CHECK(r.issued == 10);
  CHECK(r.completed == 8);
  CHECK(r.in_flight == 2);
  CHECK(r.resolution_counts.at("d2d") == 10);
  CHECK(r.per_resolution.at("d2d").count == 8);

  // Per tick: r2 reaches the holder first (0 wait), r3 waits out one 2ms
  // exchange. 1 + lag + 1 = 4, then 6 with the wait.
  for (const auto& rec : r.trace.records) {
    if (!rec.completed) continue;
    double lat = rec.complete_ms - rec.issue_ms;
    if (rec.route[0] == "r2") {
      CHECK(lat == 4.0);
      CHECK(rec.queue_wait_ms == 0.0);
    } else {
      CHECK(lat == 6.0);
      CHECK(rec.queue_wait_ms == 2.0);
    }
    CHECK(rec.route == std::vector<NodeId>{rec.route[0], "r1", rec.route[0]});
  }
  // The t=1000 pair issues but never reaches the holder before the end.
  CHECK(r.arrival_order.at("r1") == r.service_order.at("r1"));
  CHECK(r.arrival_order.at("r1").size() == 8);
}

TEST_CASE("handover keeps, reassigns after delay, and tolerates gaps") {
  const char* text = R"json({
    "seed": 5, "duration_ms": 3999, "policy": {"kind": "basic"},
    "handover": {"hysteresis_m": 5, "delay_ms": 50},
    "nodes": [
      {"id": "r1", "role": "robot", "pos": [0, 0]},
      {"id": "f1", "role": "frs", "pos": [0, 0], "coverage_radius_m": 100,
       "service_time_ms": 5, "cache_capacity": 1, "prewarm_all": true},
      {"id": "f2", "role": "frs", "pos": [12, 0], "coverage_radius_m": 100,
       "service_time_ms": 5, "cache_capacity": 1, "prewarm_all": true}
    ],
    "links": [
      {"a": "r1", "b": "f1", "one_way_ms": 1.0},
      {"a": "r1", "b": "f2", "one_way_ms": 1.0}
    ],
    "mobility": {
      "r1": [
        {"t_ms": 1000, "pos": [7, 0]},
        {"t_ms": 2000, "pos": [100, 0]},
        {"t_ms": 3000, "pos": [300, 0]}
      ]
    },
    "workload": {"arrival": {"fixed_interval_ms": 500}, "key_universe": 1}
  })json";
  RunResult r = run(parsed(text));
  REQUIRE(r.issued == 7);  // t = 500..3500
  REQUIRE(r.completed == 7);

  auto serving = [&](std::size_t i) { return r.trace.records[i].route[1]; };
  // Hysteresis: at (7,0) f2 is 2m closer, below the 5m bar -> keep f1.
  CHECK(serving(0) == "f1");  // 500
  CHECK(serving(1) == "f1");  // 1000 (issued before the move applies)
  CHECK(serving(2) == "f1");  // 1500, kept
  CHECK(serving(3) == "f1");  // 2000, reassignment pending until 2050
  // At (100,0) f2 is 12m closer -> reassign, live from t=2050.
  CHECK(serving(4) == "f2");  // 2500
  // At (300,0) nothing covers -> uncovered grace keeps the last serving node.
  CHECK(serving(6) == "f2");  // 3500
}

TEST_CASE("surge spawns one sub node and reassigns the farthest robots") {
  const char* text = R"json({
    "seed": 9, "duration_ms": 700, "policy": {"kind": "basic"},
    "surge": {"window_ms": 1000, "threshold_rps": 10, "reassignment_fraction": 0.5},
    "nodes": [
      {"id": "r1", "role": "robot", "pos": [10, 0]},
      {"id": "r2", "role": "robot", "pos": [20, 0]},
      {"id": "r3", "role": "robot", "pos": [30, 0]},
      {"id": "r4", "role": "robot", "pos": [40, 0]},
      {"id": "f1", "role": "frs", "pos": [0, 0], "coverage_radius_m": 100,
       "service_time_ms": 1, "parallel_servers": 4, "cache_capacity": 1,
       "prewarm": ["k0"]},
      {"id": "c1", "role": "cloud_region", "service_time_ms": 1, "parallel_servers": 8}
    ],
    "links": [
      {"a": "r1", "b": "f1", "one_way_ms": 1.0},
      {"a": "r2", "b": "f1", "one_way_ms": 1.0},
      {"a": "r3", "b": "f1", "one_way_ms": 1.0},
      {"a": "r4", "b": "f1", "one_way_ms": 1.0},
      {"a": "f1", "b": "c1", "one_way_ms": 10.0}
    ],
    "workload": {"arrival": {"fixed_interval_ms": 100}, "key_universe": 1}
  })json";
  RunResult r = run(parsed(text));

  // 4 arrivals per 100ms tick; the count in the trailing 1s window first
  // exceeds 10 on the 11th arrival at t=301.
  std::set<NodeId> sub_origins;
  for (const auto& rec : r.trace.records) {
    bool via_sub =
        std::count(rec.route.begin(), rec.route.end(), "f1-sub") > 0;
    if (rec.issue_ms <= 300) CHECK_FALSE(via_sub);
    if (via_sub) sub_origins.insert(rec.route[0]);
    if (rec.issue_ms >= 400 && (rec.route[0] == "r3" || rec.route[0] == "r4"))
      CHECK(via_sub);
  }
  CHECK(sub_origins == std::set<NodeId>{"r3", "r4"});

  // The spawned node starts cold: first requests it serves go to the cloud,
  // later ones hit its own cache.
  bool saw_sub_fetch = false, saw_sub_hit = false;
  for (const auto& rec : r.trace.records) {
    if (rec.route[1] != "f1-sub") continue;
    if (rec.resolution == "cloud_fetch") saw_sub_fetch = true;
    if (rec.resolution == "frs_cache_hit") saw_sub_hit = true;
  }
  CHECK(saw_sub_fetch);
  CHECK(saw_sub_hit);
}

TEST_CASE("identical runs produce byte-identical traces") {
  std::string text = kReadThrough;
  auto at = text.find("\"one_way_ms\": 50.0");
  text.replace(at, 18, "\"one_way\": {\"min_ms\": 30, \"avg_ms\": 50, \"max_ms\": 120}");
  at = text.find("{\"arrival\": {\"fixed_interval_ms\": 1000}, \"key_universe\": 1}");
  std::string poisson =
      "{\"arrival\": {\"poisson_rate_rps\": 4}, \"key_universe\": 3}";
  text.replace(at, 60, poisson);

  Scenario s = parsed(text);
  RunResult a = run(s);
  RunResult b = run(s);
  CHECK(a.trace.serialize() == b.trace.serialize());
  CHECK(a.issued > 0);

  Scenario other = s;
  other.seed = 4;
  RunResult c = run(other);
  CHECK(a.trace.serialize() != c.trace.serialize());
}

TEST_CASE("heavier load never lowers mean latency") {
  auto mean_at = [](double interval_ms) {
    std::string text = kContention;
    auto at = text.find("\"service_time_ms\": 5");
    text.replace(at, 20, "\"service_time_ms\": 15");
    at = text.find("\"fixed_interval_ms\": 1000");
    text.replace(at, 25, "\"fixed_interval_ms\": " + std::to_string(interval_ms));
    RunResult r = run(parsed(text));
    REQUIRE(r.completed > 0);
    return r.mean_latency_ms();
  };
  double congested = mean_at(10);
  double relaxed = mean_at(100);
  CHECK(congested > relaxed);
  // Two robots share each tick: 1 + 15 + 1 = 17 and 17 + 15 waited = 32.
  CHECK(relaxed == 24.5);
}

TEST_CASE("fixed interval ticks are issued at exact multiples") {
  Scenario s = parsed(kContention);
  s.duration_ms = 5000;
  s.nodes.erase(s.nodes.begin() + 1);  // drop r2
  s.links.erase(s.links.begin() + 1);
  auto reqs = generate_workload(s);
  REQUIRE(reqs.size() == 5);
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    CHECK(reqs[i].id == i);
    CHECK(reqs[i].issue_time_ms == 1000.0 * (i + 1));
    CHECK(reqs[i].origin == "r1");
    CHECK(reqs[i].data_key == "k0");
  }
}

TEST_CASE("poisson arrivals have the right density and stay in range") {
  std::string text = kContention;
  auto at = text.find("{\"arrival\": {\"fixed_interval_ms\": 1000}, \"key_universe\": 1}");
  text.replace(at, 60,
               "{\"arrival\": {\"poisson_rate_rps\": 2}, \"key_universe\": 1, "
               "\"robots\": [\"r1\"]}");
  Scenario s = parsed(text);
  s.duration_ms = 10000;

  double total = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    s.seed = seed;
    auto reqs = generate_workload(s);
    total += static_cast<double>(reqs.size());
    double prev = 0.0;
    for (const auto& r : reqs) {
      CHECK(r.issue_time_ms > prev);
      CHECK(r.issue_time_ms <= s.duration_ms);
      prev = r.issue_time_ms;
    }
  }
  double mean = total / 30.0;  // expected 20 per run
  CHECK(mean > 17.0);
  CHECK(mean < 23.0);
}

TEST_CASE("hot keys dominate draws at the configured weight") {
  std::string text = kContention;
  const std::string cap = "\"cache_capacity\": 1";
  text.replace(text.find(cap), cap.size(), "\"cache_capacity\": 4");
  const std::string uni = "\"key_universe\": 1";
  text.replace(text.find(uni), uni.size(),
               "\"key_universe\": 4, \"key_distribution\": "
               "{\"hot\": {\"fraction_hot\": 0.25, \"hot_weight\": 0.9}}");
  Scenario s = parsed(text);
  s.duration_ms = 500000;
  s.workload[0].interval_ms = 100.0;
  s.workload[0].robots = {"r1"};

  auto reqs = generate_workload(s);
  REQUIRE(reqs.size() == 5000);
  double hot = 0;
  for (const auto& r : reqs)
    if (r.data_key == "k0") ++hot;
  double frac = hot / static_cast<double>(reqs.size());
  CHECK(frac > 0.87);
  CHECK(frac < 0.93);
}

TEST_CASE("request streams are keyed by robot id, not config order") {
  std::string text = kContention;
  Scenario a = parsed(text);

  // Swap the two robot entries; draws per robot must not move.
  std::string swapped = text;
  auto r1 = swapped.find("{\"id\": \"r1\", \"role\": \"robot\", \"pos\": [0, 0]}");
  swapped.replace(r1, 44, "{\"id\": \"r2\", \"role\": \"robot\", \"pos\": [0, 0]}");
  auto r2 = swapped.find("{\"id\": \"r2\", \"role\": \"robot\", \"pos\": [0, 0]}", r1 + 44);
  swapped.replace(r2, 44, "{\"id\": \"r1\", \"role\": \"robot\", \"pos\": [0, 0]}");
  Scenario b = parsed(swapped);

  auto ra = generate_workload(a);
  auto rb = generate_workload(b);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(ra[i].id == rb[i].id);
    CHECK(ra[i].origin == rb[i].origin);
    CHECK(ra[i].data_key == rb[i].data_key);
    CHECK(ra[i].issue_time_ms == rb[i].issue_time_ms);
  }
}
