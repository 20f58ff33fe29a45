#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fogsim/calibrate.hpp"
#include "fogsim/engine.hpp"
#include "fogsim/experiments.hpp"
#include "fogsim/scenario.hpp"

using namespace fogsim;

namespace {

double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

const ResultRow& find_row(const ExperimentTable& t, const std::string& arch, int robots,
                          const std::string& target, int frs_count = -1) {
  for (const ResultRow& r : t.rows) {
    if (r.arch == arch && r.robots == robots && r.target == target &&
        (frs_count < 0 || r.frs_count == frs_count)) {
      return r;
    }
  }
  REQUIRE_MESSAGE(false, "row not found: " << arch << " robots=" << robots << " target=" << target);
  return t.rows.front();
}

std::vector<const ResultRow*> arch_rows(const ExperimentTable& t, const std::string& arch,
                                        const std::string& target) {
  std::vector<const ResultRow*> out;
  for (const ResultRow& r : t.rows) {
    if (r.arch == arch && r.target == target) out.push_back(&r);
  }
  return out;
}

double run_seconds(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

// Mean latency rises with the fog link until the heavier deadline-bearing
// stream starts dropping, then falls: a hump no bisection should trust.
Scenario hump_scenario() {
  Scenario s = ab_fr_scenario(1);
  s.duration_ms = 3000.0;
  for (NodeSpec& n : s.nodes) {
    if (n.id == "f1") {
      n.service_time_ms = 4.0;
      n.cache_capacity = 2;
    }
  }
  for (LinkSpec& l : s.links) l.bandwidth_bytes_per_s = 1e5;
  WorkloadStream heavy;
  heavy.label = "b";
  heavy.response_bytes = 3000.0;
  heavy.deadline_ms = 50.0;
  s.workload.push_back(heavy);
  return s;
}

}  // namespace

TEST_CASE("knob paths read and write every addressable parameter") {
  Scenario s = ab_d2d_scenario(3);

  CHECK(read_knob(s, "node:f1.service_time_ms") == 5.0);
  apply_knob(s, "node:f1.service_time_ms", 7.5);
  CHECK(s.nodes.front().service_time_ms == 7.5);

  apply_knob(s, "node:f1.parallel_servers", 3.0);
  CHECK(s.nodes.front().parallel_servers == 3);
  CHECK(read_knob(s, "node:f1.parallel_servers") == 3.0);

  CHECK(read_knob(s, "role:frs.service_time_ms") == 7.5);
  apply_knob(s, "role:frs.service_time_ms", 2.25);
  CHECK(read_knob(s, "node:f1.service_time_ms") == 2.25);

  CHECK(read_knob(s, "links.robot_robot.one_way_ms") == 1.0);
  apply_knob(s, "links.robot_robot.one_way_ms", 0.75);
  int robot_links = 0;
  for (const LinkSpec& l : s.links) {
    if (l.a[0] == 'r' && l.b[0] == 'r') {
      CHECK(l.one_way == LatencyModel::constant(0.75));
      ++robot_links;
    }
  }
  CHECK(robot_links == 3);
  apply_knob(s, "links.robot_fog.one_way_ms", 1.5);
  CHECK(read_knob(s, "links.robot_fog.one_way_ms") == 1.5);

  CHECK(read_knob(s, "workload.interval_ms") == 1000.0);
  apply_knob(s, "workload.interval_ms", 250.0);
  CHECK(s.workload.front().interval_ms == 250.0);
  apply_knob(s, "workload.rate_rps", 4.0);
  CHECK(s.workload.front().rate_rps == 4.0);

  CHECK(read_knob(s, "policy.d2d_internal_lag_ms") == 2.0);
  apply_knob(s, "policy.d2d_internal_lag_ms", 1.25);
  CHECK(s.policy.d2d_internal_lag_ms == 1.25);

  CHECK_THROWS_AS(read_knob(s, "node:f9.service_time_ms"), ConfigError);
  CHECK_THROWS_AS(read_knob(s, "node:f1.coverage"), ConfigError);
  CHECK_THROWS_AS(read_knob(s, "links.fog_cloud.one_way_ms"), ConfigError);  // no cloud here
  CHECK_THROWS_AS(read_knob(s, "turbo"), ConfigError);
  CHECK_THROWS_AS(apply_knob(s, "role:cloud_region.service_time_ms", 1.0), ConfigError);
}

TEST_CASE("service time fits the single-robot endpoint within one percent") {
  std::vector<CalibrationTarget> targets = {{"fr-low", ab_fr_scenario(1), 8.58, 0.001}};
  CalibrationResult res = calibrate(targets, {{"role:frs.service_time_ms", 0.0, 20.0}});

  REQUIRE(res.fitted.size() == 1);
  const FittedKnob& f = res.fitted.front();
  CHECK(f.path == "role:frs.service_time_ms");
  CHECK(f.label == "fr-low");
  CHECK(rel_err(f.value, 6.58) < 0.01);
  CHECK(rel_err(f.achieved_ms, 8.58) <= 0.001);
  CHECK(f.evaluations <= 64);
}

TEST_CASE("a target already satisfied returns the knob unchanged after one run") {
  Scenario s = ab_fr_scenario(1);
  apply_knob(s, "role:frs.service_time_ms", 6.25);
  double current = run(s).overall.mean_ms;  // 2 ms links + 6.25 ms service

  std::vector<CalibrationTarget> targets = {{"as-is", s, current, 0.001}};
  CalibrationResult res = calibrate(targets, {{"role:frs.service_time_ms", 0.0, 20.0}});

  REQUIRE(res.fitted.size() == 1);
  CHECK(res.fitted.front().value == 6.25);
  CHECK(res.fitted.front().achieved_ms == current);
  CHECK(res.fitted.front().evaluations == 1);
}

TEST_CASE("endpoints that cannot bracket the target fail loudly") {
  std::vector<CalibrationTarget> targets = {{"too-far", ab_fr_scenario(1), 100.0, 0.001}};
  try {
    calibrate(targets, {{"role:frs.service_time_ms", 0.0, 1.0}});
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    CHECK(e.kind() == CalibrationError::Kind::Unbracketable);
    CHECK(e.knob() == "role:frs.service_time_ms");
    CHECK(std::string(e.what()).find("role:frs.service_time_ms") != std::string::npos);
  }
}

TEST_CASE("non-monotone metrics are reported, not silently bisected") {
  // Endpoints straddle the 25 ms target but the midpoint sits above both.
  std::vector<CalibrationTarget> targets = {{"hump", hump_scenario(), 25.0, 0.001}};
  try {
    calibrate(targets, {{"links.robot_fog.one_way_ms", 0.5, 10.0}});
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    CHECK(e.kind() == CalibrationError::Kind::NonMonotone);
    CHECK(e.knob() == "links.robot_fog.one_way_ms");
  }
}

TEST_CASE("integer capacity scans ascending before the continuous load knob") {
  std::vector<CalibrationTarget> targets = {
      {"fr-low", ab_fr_scenario(1), 8.58, 0.001},
      {"fr-high", ab_fr_scenario(5), 19.51, 0.005},
  };
  CalibrationResult res = calibrate(targets, {
                                                 {"role:frs.service_time_ms", 0.0, 20.0},
                                                 {"node:f1.parallel_servers", 1, 5, true},
                                                 {"workload.interval_ms", 5.0, 60.0},
                                             });

  REQUIRE(res.fitted.size() == 3);
  CHECK(rel_err(res.fitted[0].value, 6.58) < 0.01);
  // One server can never reach down to 19.51; two brackets it.
  CHECK(res.fitted[1].value == 2.0);
  CHECK(res.fitted[1].label == "fr-high");
  CHECK(res.fitted[2].path == "workload.interval_ms");
  CHECK(res.fitted[2].value > 5.0);
  CHECK(res.fitted[2].value < 60.0);
  CHECK(rel_err(res.fitted[2].achieved_ms, 19.51) <= 0.005);
}

TEST_CASE("robot sweep reproduces the published endpoints per architecture") {
  ExperimentTable t;
  double elapsed = run_seconds([&] { t = run_experiment_ab(); });
  CHECK(elapsed < 10.0);
  REQUIRE(t.rows.size() == 5 + 4 + 3 * 5);

  const ResultRow& fr1 = find_row(t, "fr-basic", 1, "-");
  const ResultRow& fr5 = find_row(t, "fr-basic", 5, "-");
  CHECK(rel_err(fr1.stats.mean_ms, 8.58) < 0.05);
  CHECK(rel_err(fr5.stats.mean_ms, 19.51) < 0.05);
  CHECK(fr1.resolution_mix == "frs_cache_hit:1.000");

  const ResultRow& d2 = find_row(t, "fr-d2d", 2, "-");
  const ResultRow& d5 = find_row(t, "fr-d2d", 5, "-");
  CHECK(rel_err(d2.stats.mean_ms, 3.82) < 0.05);
  CHECK(rel_err(d5.stats.mean_ms, 6.75) < 0.05);
  CHECK(d2.resolution_mix == "d2d:1.000");

  // Under spare capacity the cloud sweep is flat, which satisfies both
  // published endpoints at once.
  const double cloud_low[] = {208.0, 540.04, 1085.71};
  const double cloud_high[] = {208.39, 540.43, 1086.09};
  for (std::size_t ri = 0; ri < cloud_regions().size(); ++ri) {
    const std::string& name = cloud_regions()[ri].name;
    for (int n = 1; n <= 5; ++n) {
      const ResultRow& row = find_row(t, "cloud", n, name);
      CHECK(rel_err(row.stats.mean_ms, cloud_low[ri]) < 0.01);
      CHECK(rel_err(row.stats.mean_ms, cloud_high[ri]) < 0.01);
      CHECK(row.resolution_mix == "cloud_fetch:1.000");
    }
  }

  // Load only ever grows with robot count: every latency column is
  // non-decreasing within an architecture.
  std::vector<std::pair<std::string, std::string>> groups = {{"fr-basic", "-"}, {"fr-d2d", "-"}};
  for (const RegionProfile& r : cloud_regions()) groups.emplace_back("cloud", r.name);
  for (const auto& [arch, target] : groups) {
    std::vector<const ResultRow*> rows = arch_rows(t, arch, target);
    REQUIRE(rows.size() >= 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i]->robots > rows[i - 1]->robots);
      CHECK(rows[i]->stats.min_ms >= rows[i - 1]->stats.min_ms);
      CHECK(rows[i]->stats.mean_ms >= rows[i - 1]->stats.mean_ms);
      CHECK(rows[i]->stats.median_ms >= rows[i - 1]->stats.median_ms);
      CHECK(rows[i]->stats.p95_ms >= rows[i - 1]->stats.p95_ms);
      CHECK(rows[i]->stats.max_ms >= rows[i - 1]->stats.max_ms);
    }
  }

  for (const ResultRow& r : t.rows) {
    CHECK(r.samples > 0);
    CHECK(r.stats.count == r.samples);
    CHECK(r.experiment == "ab");
  }
  CHECK(t.fitted.count("fr-low/role:frs.service_time_ms") == 1);
  CHECK(t.fitted.count("fr-high/node:f1.parallel_servers") == 1);
  CHECK(t.fitted.count("fr-high/workload.interval_ms") == 1);
  CHECK(t.fitted.count("d2d-low/links.robot_robot.one_way_ms") == 1);
  CHECK(t.fitted.count("cloud-sydney/node:cl.service_time_ms") == 1);

  // Same build, same seeds: the table serializes byte-identically.
  CHECK(to_csv(run_experiment_ab()) == to_csv(t));
}

TEST_CASE("fog latency stays constant while the cloud baseline saturates") {
  ExperimentTable t;
  double elapsed = run_seconds([&] { t = run_experiment_c(); });
  CHECK(elapsed < 30.0);
  const int counts[] = {2, 5, 10, 15, 20};
  REQUIRE(t.rows.size() == 5 + 3 * 5);

  // Per-FRS load never changes, so the fog mean must not drift at all.
  std::vector<double> fr_means;
  for (int n : counts) {
    const ResultRow& row = find_row(t, "fr-multi", 4 * n, "-", n);
    CHECK(rel_err(row.stats.mean_ms, 10.73) < 0.05);
    fr_means.push_back(row.stats.mean_ms);
  }
  double mean = 0.0;
  for (double v : fr_means) mean += v;
  mean /= static_cast<double>(fr_means.size());
  double var = 0.0;
  for (double v : fr_means) var += (v - mean) * (v - mean);
  double cv = std::sqrt(var / static_cast<double>(fr_means.size())) / mean;
  CHECK(cv < 0.01);

  const double cloud_low[] = {208.07, 270.38, 1086.4};
  const double cloud_high[] = {3609.32, 3884.3, 4336.18};
  for (std::size_t ri = 0; ri < cloud_regions().size(); ++ri) {
    const std::string& name = cloud_regions()[ri].name;
    double prev = 0.0;
    for (int n : counts) {
      const ResultRow& row = find_row(t, "cloud", 4 * n, name, n);
      CHECK(row.stats.mean_ms > prev);  // strictly more latency per FRS step
      prev = row.stats.mean_ms;
    }
    CHECK(rel_err(find_row(t, "cloud", 8, name, 2).stats.mean_ms, cloud_low[ri]) < 0.10);
    CHECK(rel_err(find_row(t, "cloud", 80, name, 20).stats.mean_ms, cloud_high[ri]) < 0.10);
  }
}

TEST_CASE("rescue preset meets deadlines the forced-cloud variant misses") {
  ExperimentTable t = run_experiment_rescue();
  REQUIRE(t.rows.size() == 2);
  const ResultRow& fog = t.rows[0];
  const ResultRow& cloud = t.rows[1];

  CHECK(fog.arch == "fr-multi");
  CHECK(cloud.arch == "cloud");
  CHECK(cloud.target == "sao_paulo");
  CHECK(fog.deadline_met_fraction > cloud.deadline_met_fraction);
  CHECK(fog.deadline_met_fraction >= 0.95);
  CHECK(cloud.deadline_met_fraction <= 0.05);

  // The mixed workload actually exercises the cache hierarchy.
  CHECK(fog.resolution_mix.find("frs_cache_hit:") != std::string::npos);
  CHECK(fog.resolution_mix.find("cloud_fetch:") != std::string::npos);
  CHECK(cloud.resolution_mix == "cloud_fetch:1.000");

  // Staging the map tiles ahead of time removes every cloud round trip.
  RunResult warmed = run(rescue_preset(true));
  CHECK(warmed.resolution_counts.count("cloud_fetch") == 0);
  CHECK(warmed.resolution_counts.at("frs_cache_hit") == warmed.issued);

  // The preset survives a serialize/parse round trip unchanged.
  ParseResult round = parse_config(serialize(rescue_preset(false)));
  REQUIRE(round.issues.empty());
  CHECK(*round.scenario == rescue_preset(false));
}

TEST_CASE("experiment tables serialize deterministically with metadata headers") {
  ExperimentTable t = run_experiment_rescue();
  std::string csv = to_csv(t);
  CHECK(csv == to_csv(run_experiment_rescue()));

  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t nl = csv.find('\n', pos);
    lines.push_back(csv.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "# seed=8400");
  CHECK(lines[1].rfind("# config_hash=", 0) == 0);
  CHECK(lines[1].size() == 14 + 16);
  CHECK(lines[2] == "# prng=xoshiro256++");
  CHECK(lines[3] ==
        "experiment,arch,frs_count,robots,target,resolution_mix,lat_min_ms,lat_mean_ms,"
        "lat_median_ms,lat_p95_ms,lat_max_ms,deadline_met_fraction,samples,seed");
  for (std::size_t i = 4; i < lines.size(); ++i) {
    std::size_t commas = 0;
    for (char c : lines[i]) commas += c == ',';
    CHECK(commas == 13);
    CHECK(lines[i].rfind("rescue,", 0) == 0);
  }
}
