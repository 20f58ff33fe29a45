#include "fogsim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fogsim/calibrate.hpp"
#include "fogsim/engine.hpp"
#include "fogsim/rng.hpp"

namespace fogsim {

const std::vector<RegionProfile>& cloud_regions() {
  static const std::vector<RegionProfile> regions = {
      {"sydney", 32.19, 95.83, 405.8},
      {"seoul", 246.76, 261.85, 282.5},
      {"sao_paulo", 390.16, 534.68, 1116.9},
  };
  return regions;
}

namespace {

// Reference endpoints the calibration reproduces, per region in
// cloud_regions() order.
struct CloudFit {
  double ab_low_ms;       // flat sweep value, 1..5 robots
  double c_low_ms;        // 8 robots, under capacity
  double c_high_ms;       // 80 robots, past capacity
  double c_duration_ms;   // long enough for the ramp to average out
  double c_interval_lo;   // search range for the load interval
  double c_interval_hi;
};

constexpr CloudFit kCloudFits[] = {
    {208.0, 208.07, 3609.32, 128000.0, 700.0, 1400.0},
    {540.04, 270.38, 3884.3, 8600.0, 5.0, 120.0},
    {1085.71, 1086.4, 4336.18, 600000.0, 4500.0, 6500.0},
};

constexpr double kAbFrLowMs = 8.58;    // 1 robot, single FRS
constexpr double kAbFrHighMs = 19.51;  // 5 robots, single FRS
constexpr double kAbD2dLowMs = 3.82;   // 1 requester next to the holder
constexpr double kCFrMs = 10.73;       // constant across FRS counts

std::size_t region_index(const RegionProfile& region) {
  const auto& all = cloud_regions();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].name == region.name) return i;
  }
  throw ConfigError("unknown cloud region '" + region.name + "'");
}

NodeSpec make_robot(const NodeId& id, double x, double y) {
  NodeSpec n;
  n.id = id;
  n.role = Role::Robot;
  n.pos = {x, y};
  return n;
}

NodeSpec make_fog(const NodeId& id, double x, double coverage, double service, int parallel,
                  std::size_t cache) {
  NodeSpec n;
  n.id = id;
  n.role = Role::Frs;
  n.pos = {x, 0.0};
  n.coverage_radius_m = coverage;
  n.service_time_ms = service;
  n.parallel_servers = parallel;
  n.cache_capacity = cache;
  return n;
}

NodeSpec make_cloud(const NodeId& id, double service, int parallel) {
  NodeSpec n;
  n.id = id;
  n.role = Role::CloudRegion;
  n.service_time_ms = service;
  n.parallel_servers = parallel;
  return n;
}

LinkSpec make_link(const NodeId& a, const NodeId& b, double ms,
                   double bw = kUnlimitedBandwidth) {
  LinkSpec l;
  l.a = a;
  l.b = b;
  l.one_way = LatencyModel::constant(ms);
  l.bandwidth_bytes_per_s = bw;
  return l;
}

std::string two_digits(int v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", v);
  return buf;
}

std::string three_digits(int v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

ResultRow make_row(const std::string& experiment, const std::string& arch, int frs_count,
                   int robots, const std::string& target, const Scenario& sc) {
  RunResult r = run(sc);
  ResultRow row;
  row.experiment = experiment;
  row.arch = arch;
  row.frs_count = frs_count;
  row.robots = robots;
  row.target = target;
  std::string mix;
  for (const auto& [name, count] : r.resolution_counts) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s:%.3f", name.c_str(),
                  r.issued > 0 ? static_cast<double>(count) / static_cast<double>(r.issued)
                               : 0.0);
    if (!mix.empty()) mix += ';';
    mix += buf;
  }
  row.resolution_mix = mix;
  row.stats = r.overall;
  row.deadline_met_fraction = r.deadline_met_fraction;
  row.samples = r.overall.count;
  row.seed = sc.seed;
  return row;
}

void record_fits(ExperimentTable& t, const CalibrationResult& res) {
  for (const FittedKnob& f : res.fitted) t.fitted[f.label + "/" + f.path] = f.value;
}

std::string table_hash(const std::string& descriptor) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(descriptor)));
  return buf;
}

}  // namespace

Scenario ab_fr_scenario(int robots) {
  Scenario s;
  s.seed = 8100 + static_cast<std::uint64_t>(robots);
  s.seed_set = true;
  s.duration_ms = 3000.0;
  s.nodes.push_back(make_fog("f1", 0.0, 100.0, 5.0, 1, 1));
  for (int i = 1; i <= robots; ++i) {
    NodeId id = "r" + std::to_string(i);
    s.nodes.push_back(make_robot(id, 5.0 * i, 0.0));
    s.links.push_back(make_link(id, "f1", 1.0));
  }
  s.prewarm_all.insert("f1");
  s.workload.push_back(WorkloadStream{});  // fixed 1000 ms ticks, one key
  return s;
}

Scenario ab_d2d_scenario(int robots) {
  Scenario s;
  s.seed = 8110 + static_cast<std::uint64_t>(robots);
  s.seed_set = true;
  s.duration_ms = 5000.0;
  s.nodes.push_back(make_fog("f1", 0.0, 100.0, 5.0, 1, 1));
  s.prewarm_all.insert("f1");
  std::vector<NodeId> ids;
  for (int i = 1; i <= robots; ++i) {
    NodeId id = "r" + std::to_string(i);
    ids.push_back(id);
    s.nodes.push_back(make_robot(id, 3.0 * (i - 1), 0.0));
    s.links.push_back(make_link(id, "f1", 1.0));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      s.links.push_back(make_link(ids[i], ids[j], 1.0));
    }
  }
  s.policy.kind = PolicyKind::D2d;
  s.policy.d2d_range_m = 100.0;
  s.policy.d2d_internal_lag_ms = 2.0;
  s.holdings["r1"] = {"k0"};  // r1 is the data holder and issues nothing
  WorkloadStream w;
  w.robots.assign(ids.begin() + 1, ids.end());
  s.workload.push_back(w);
  return s;
}

Scenario ab_cloud_scenario(const RegionProfile& region, int robots) {
  Scenario s;
  s.seed = 8130 + 10 * region_index(region) + static_cast<std::uint64_t>(robots);
  s.seed_set = true;
  s.duration_ms = 5000.0;
  // The relay fog adds nothing: zero links, zero service, no cache. Every
  // request read-throughs to the one capacity-limited region server.
  s.nodes.push_back(make_fog("f1", 0.0, 100.0, 0.0, 1, 0));
  s.nodes.push_back(make_cloud("cl", 100.0, 8));
  s.links.push_back(make_link("f1", "cl", region.rtt_avg_ms / 2.0));
  for (int i = 1; i <= robots; ++i) {
    NodeId id = "r" + std::to_string(i);
    s.nodes.push_back(make_robot(id, 1.0 * i, 0.0));
    s.links.push_back(make_link(id, "f1", 0.0));
  }
  s.workload.push_back(WorkloadStream{});
  return s;
}

Scenario c_fr_scenario(int frs_count) {
  Scenario s;
  s.seed = 8200 + static_cast<std::uint64_t>(frs_count);
  s.seed_set = true;
  s.duration_ms = 5000.0;
  s.policy.kind = PolicyKind::MultiFrs;
  constexpr double offsets[] = {-10.0, -5.0, 5.0, 10.0};
  for (int i = 1; i <= frs_count; ++i) {
    NodeId fid = "f" + two_digits(i);
    double fx = 200.0 * (i - 1);
    s.nodes.push_back(make_fog(fid, fx, 90.0, 5.0, 2, 1));
    s.prewarm_all.insert(fid);
    for (int j = 0; j < 4; ++j) {
      NodeId rid = "r" + two_digits(i) + "-" + std::to_string(j + 1);
      s.nodes.push_back(make_robot(rid, fx + offsets[j], 0.0));
      s.links.push_back(make_link(rid, fid, 1.0));
    }
    if (i > 1) {
      NodeId prev = "f" + two_digits(i - 1);
      s.links.push_back(make_link(prev, fid, 2.0));
      s.policy.adjacency.emplace_back(prev, fid);
    }
  }
  s.workload.push_back(WorkloadStream{});
  return s;
}

Scenario c_cloud_scenario(const RegionProfile& region, int frs_count) {
  std::size_t ri = region_index(region);
  Scenario s;
  s.seed = 8260 + 30 * ri + static_cast<std::uint64_t>(frs_count);
  s.seed_set = true;
  s.duration_ms = kCloudFits[ri].c_duration_ms;
  s.nodes.push_back(make_fog("f1", 0.0, 100.0, 0.0, 1, 0));
  s.nodes.push_back(make_cloud("cl", 100.0, 8));
  s.links.push_back(make_link("f1", "cl", region.rtt_avg_ms / 2.0));
  int robots = 4 * frs_count;
  for (int i = 1; i <= robots; ++i) {
    NodeId id = "r" + three_digits(i);
    s.nodes.push_back(make_robot(id, 1.0 * i, 0.0));
    s.links.push_back(make_link(id, "f1", 0.0));
  }
  s.workload.push_back(WorkloadStream{});
  return s;
}

Scenario rescue_preset(bool prewarm_all_caches) {
  Scenario s;
  s.seed = 8400;
  s.seed_set = true;
  s.duration_ms = 10000.0;
  s.policy.kind = PolicyKind::MultiFrs;
  constexpr double kBw = 1e7;  // bytes/s; map tiles are heavy on purpose
  constexpr double offsets[] = {-10.0, -5.0, 5.0, 10.0};
  for (int i = 1; i <= 3; ++i) {
    NodeId fid = "f" + std::to_string(i);
    double fx = 200.0 * (i - 1);
    s.nodes.push_back(make_fog(fid, fx, 90.0, 5.0, 2, 14));
    for (int j = 0; j < 4; ++j) {
      NodeId rid = "r" + std::to_string(i) + "-" + std::to_string(j + 1);
      s.nodes.push_back(make_robot(rid, fx + offsets[j], 0.0));
      s.links.push_back(make_link(rid, fid, 1.0, kBw));
    }
    if (i > 1) {
      NodeId prev = "f" + std::to_string(i - 1);
      s.links.push_back(make_link(prev, fid, 2.0, kBw));
      s.policy.adjacency.emplace_back(prev, fid);
    }
    // Near-region cloud behind every FRS (half of the lowest average RTT).
    s.links.push_back(make_link(fid, "cl", cloud_regions()[0].rtt_avg_ms / 2.0, kBw));
  }
  s.nodes.push_back(make_cloud("cl", 5.0, 8));

  WorkloadStream map_tiles;
  map_tiles.label = "map";
  map_tiles.interval_ms = 500.0;
  map_tiles.key_universe = 8;
  map_tiles.key_dist = WorkloadStream::KeyDist::Hot;
  map_tiles.fraction_hot = 0.25;
  map_tiles.hot_weight = 0.9;
  map_tiles.request_bytes = 256.0;
  map_tiles.response_bytes = 1e6;

  WorkloadStream victim;
  victim.label = "victim";
  victim.interval_ms = 300.0;
  victim.key_universe = 4;
  victim.request_bytes = 128.0;
  victim.response_bytes = 2048.0;
  victim.deadline_ms = 50.0;

  WorkloadStream telemetry;
  telemetry.label = "stream";
  telemetry.interval_ms = 100.0;
  telemetry.key_universe = 2;
  telemetry.request_bytes = 64.0;
  telemetry.response_bytes = 512.0;

  s.workload = {map_tiles, victim, telemetry};

  if (prewarm_all_caches) {
    s.prewarm_all = {"f1", "f2", "f3"};
  } else {
    // Victim status and telemetry are staged ahead of time; map tiles are not.
    std::vector<std::string> staged;
    for (int k = 0; k < victim.key_universe; ++k) staged.push_back(victim.key_name(k));
    for (int k = 0; k < telemetry.key_universe; ++k) staged.push_back(telemetry.key_name(k));
    for (const char* fid : {"f1", "f2", "f3"}) s.prewarm[fid] = staged;
  }
  return s;
}

Scenario rescue_cloud_variant() {
  Scenario s = rescue_preset(false);
  s.seed = 8401;
  s.policy = RoutingPolicy{};  // no d2d, no adjacency
  s.prewarm.clear();
  for (NodeSpec& n : s.nodes) {
    if (n.is_fog()) n.cache_capacity = 0;  // every request goes to the cloud
  }
  for (LinkSpec& l : s.links) {
    if (l.b == "cl" || l.a == "cl") {
      l.one_way = LatencyModel::constant(cloud_regions()[2].rtt_avg_ms / 2.0);
    }
  }
  return s;
}

ExperimentTable run_experiment_ab() {
  ExperimentTable t;
  t.name = "ab";
  t.seed = 8100;
  std::string descriptor = "ab\n";
  auto add_row = [&](const std::string& arch, int frs, int robots, const std::string& target,
                     const Scenario& sc) {
    t.rows.push_back(make_row("ab", arch, frs, robots, target, sc));
    descriptor += config_hash(sc) + "\n";
  };

  // Single-FRS architecture: fit service time at 1 robot, then capacity and
  // tick interval at 5 robots.
  std::vector<CalibrationTarget> fr_targets = {
      {"fr-low", ab_fr_scenario(1), kAbFrLowMs, 0.001},
      {"fr-high", ab_fr_scenario(5), kAbFrHighMs, 0.005},
  };
  CalibrationResult fr = calibrate(fr_targets, {
                                                   {"role:frs.service_time_ms", 0.0, 20.0},
                                                   {"node:f1.parallel_servers", 1, 5, true},
                                                   {"workload.interval_ms", 5.0, 60.0},
                                               });
  record_fits(t, fr);
  for (int n = 1; n <= 5; ++n) {
    Scenario sc = ab_fr_scenario(n);
    for (const FittedKnob& f : fr.fitted) apply_knob(sc, f.path, f.value);
    add_row("fr-basic", 1, n, "-", sc);
  }

  // Device-to-device architecture: fit the robot-to-robot link at one
  // requester; load grows by queueing at the single holder.
  std::vector<CalibrationTarget> d2d_targets = {
      {"d2d-low", ab_d2d_scenario(2), kAbD2dLowMs, 0.001},
  };
  CalibrationResult d2d =
      calibrate(d2d_targets, {{"links.robot_robot.one_way_ms", 0.1, 2.0}});
  record_fits(t, d2d);
  for (int n = 2; n <= 5; ++n) {
    Scenario sc = ab_d2d_scenario(n);
    for (const FittedKnob& f : d2d.fitted) apply_knob(sc, f.path, f.value);
    add_row("fr-d2d", 1, n, "-", sc);
  }

  // Cloud baselines: fit each region's service time at 1 robot; with spare
  // cloud capacity the sweep stays flat.
  for (std::size_t ri = 0; ri < cloud_regions().size(); ++ri) {
    const RegionProfile& region = cloud_regions()[ri];
    std::vector<CalibrationTarget> targets = {
        {"cloud-" + region.name, ab_cloud_scenario(region, 1), kCloudFits[ri].ab_low_ms, 0.0005},
    };
    CalibrationResult fit = calibrate(targets, {{"node:cl.service_time_ms", 0.0, 1200.0}});
    record_fits(t, fit);
    for (int n = 1; n <= 5; ++n) {
      Scenario sc = ab_cloud_scenario(region, n);
      for (const FittedKnob& f : fit.fitted) apply_knob(sc, f.path, f.value);
      add_row("cloud", 1, n, region.name, sc);
    }
  }
  t.config_hash = table_hash(descriptor);
  return t;
}

ExperimentTable run_experiment_c() {
  ExperimentTable t;
  t.name = "c";
  t.seed = 8200;
  std::string descriptor = "c\n";
  auto add_row = [&](const std::string& arch, int frs, const std::string& target,
                     const Scenario& sc) {
    t.rows.push_back(make_row("c", arch, frs, 4 * frs, target, sc));
    descriptor += config_hash(sc) + "\n";
  };
  constexpr int kFrsCounts[] = {2, 5, 10, 15, 20};

  // Fog rows: per-FRS load never changes, so the fitted service time holds
  // the mean constant across deployment sizes.
  std::vector<CalibrationTarget> fr_targets = {
      {"c-fr", c_fr_scenario(2), kCFrMs, 0.0005},
  };
  CalibrationResult fr = calibrate(fr_targets, {{"role:frs.service_time_ms", 0.0, 20.0}});
  record_fits(t, fr);
  for (int n : kFrsCounts) {
    Scenario sc = c_fr_scenario(n);
    for (const FittedKnob& f : fr.fitted) apply_knob(sc, f.path, f.value);
    add_row("fr-multi", n, "-", sc);
  }

  // Cloud rows: fit region service time under capacity (8 robots on 8
  // servers), then the tick interval so 80 robots saturate at the published
  // high endpoint. Queue ramps need long horizons; tolerance is looser
  // because the completed-mean moves in tick-sized steps.
  for (std::size_t ri = 0; ri < cloud_regions().size(); ++ri) {
    const RegionProfile& region = cloud_regions()[ri];
    const CloudFit& fitspec = kCloudFits[ri];
    std::vector<CalibrationTarget> targets = {
        {"c-cloud-" + region.name + "-low", c_cloud_scenario(region, 2), fitspec.c_low_ms,
         0.0005},
        {"c-cloud-" + region.name + "-high", c_cloud_scenario(region, 20), fitspec.c_high_ms,
         0.02},
    };
    CalibrationResult fit =
        calibrate(targets, {
                               {"node:cl.service_time_ms", 0.0, 1200.0},
                               {"workload.interval_ms", fitspec.c_interval_lo,
                                fitspec.c_interval_hi},
                           });
    record_fits(t, fit);
    for (int n : kFrsCounts) {
      Scenario sc = c_cloud_scenario(region, n);
      for (const FittedKnob& f : fit.fitted) apply_knob(sc, f.path, f.value);
      add_row("cloud", n, region.name, sc);
    }
  }
  t.config_hash = table_hash(descriptor);
  return t;
}

ExperimentTable run_experiment_rescue() {
  ExperimentTable t;
  t.name = "rescue";
  t.seed = 8400;
  Scenario preset = rescue_preset(false);
  Scenario forced = rescue_cloud_variant();
  t.rows.push_back(make_row("rescue", "fr-multi", 3, 12, "-", preset));
  t.rows.push_back(make_row("rescue", "cloud", 3, 12, "sao_paulo", forced));
  t.config_hash = table_hash("rescue\n" + config_hash(preset) + "\n" + config_hash(forced) + "\n");
  return t;
}

ExperimentTable simulate_table(const Scenario& sc) {
  std::string arch = "fr-basic";
  if (sc.policy.kind == PolicyKind::D2d) arch = "fr-d2d";
  if (sc.policy.kind == PolicyKind::MultiFrs) arch = "fr-multi";
  int fogs = 0;
  int robots = 0;
  for (const NodeSpec& n : sc.nodes) {
    if (n.is_fog()) ++fogs;
    if (n.role == Role::Robot) ++robots;
  }
  ExperimentTable t;
  t.name = "simulate";
  t.seed = sc.seed;
  t.config_hash = config_hash(sc);
  t.rows.push_back(make_row("simulate", arch, fogs, robots, "-", sc));
  return t;
}

std::string to_csv(const ExperimentTable& t) {
  std::string out;
  out += "# seed=" + std::to_string(t.seed) + "\n";
  out += "# config_hash=" + t.config_hash + "\n";
  out += std::string("# prng=") + kPrngAlgorithm + "\n";
  out += std::string(kResultCsvColumns) + "\n";
  for (const ResultRow& r : t.rows) {
    out += r.experiment + ',' + r.arch + ',' + std::to_string(r.frs_count) + ',' +
           std::to_string(r.robots) + ',' + r.target + ',' + r.resolution_mix + ',' +
           fmt6(r.stats.min_ms) + ',' + fmt6(r.stats.mean_ms) + ',' + fmt6(r.stats.median_ms) +
           ',' + fmt6(r.stats.p95_ms) + ',' + fmt6(r.stats.max_ms) + ',' +
           fmt6(r.deadline_met_fraction) + ',' + std::to_string(r.samples) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

}  // namespace fogsim
