#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fogsim/scenario.hpp"
#include "fogsim/types.hpp"

namespace fogsim {

// Measured robot-to-cloud round-trip profile for one public region.
struct RegionProfile {
  std::string name;
  double rtt_min_ms = 0.0;
  double rtt_avg_ms = 0.0;
  double rtt_max_ms = 0.0;
};

// sydney, seoul, sao_paulo (ascending average RTT).
const std::vector<RegionProfile>& cloud_regions();

struct ResultRow {
  std::string experiment;      // "ab" | "c" | "rescue"
  std::string arch;            // "fr-basic" | "fr-d2d" | "fr-multi" | "cloud"
  int frs_count = 0;
  int robots = 0;
  std::string target;          // cloud region name, "-" for fog rows
  std::string resolution_mix;  // "name:frac;..." sorted by name, fractions of issued
  LatencyStats stats;          // completed requests
  double deadline_met_fraction = 1.0;
  std::size_t samples = 0;  // completed request count
  std::uint64_t seed = 0;
};

struct ExperimentTable {
  std::string name;            // "ab" | "c" | "rescue"
  std::uint64_t seed = 0;      // base seed; each row also records its own
  std::string config_hash;     // hash over every row scenario's config hash
  std::vector<ResultRow> rows;
  // Calibrated values keyed "<target label>/<knob path>"; empty for presets.
  std::map<std::string, double> fitted;
};

// Column header shared by every result CSV this artifact writes.
inline constexpr const char* kResultCsvColumns =
    "experiment,arch,frs_count,robots,target,resolution_mix,lat_min_ms,lat_mean_ms,"
    "lat_median_ms,lat_p95_ms,lat_max_ms,deadline_met_fraction,samples,seed";

// Header lines (# seed=, # config_hash=, # prng=) then one CSV row per entry.
// Byte-identical across reruns.
std::string to_csv(const ExperimentTable& t);

// Runs one scenario and wraps the outcome as a single-row table whose
// config_hash is the scenario's own hash.
ExperimentTable simulate_table(const Scenario& sc);

// Scenario builders, exposed so tests can probe them directly. All links are
// constant-latency, so runs are deterministic without any RNG draws beyond
// workload generation.

// Single FRS, `robots` robots on fixed-interval streams, every key prewarmed.
Scenario ab_fr_scenario(int robots);
// Robot r1 holds every key; the other robots fetch over device-to-device.
Scenario ab_d2d_scenario(int robots);
// Zero-cost relay fog in front of one capacity-limited cloud region.
Scenario ab_cloud_scenario(const RegionProfile& region, int robots);
// `frs_count` FRS in a line, 4 robots each, prewarmed, adjacency chain.
Scenario c_fr_scenario(int frs_count);
// All 4*frs_count robots through one relay into one cloud region.
Scenario c_cloud_scenario(const RegionProfile& region, int frs_count);
// Search-and-rescue mix: map tiles (heavy, cold), victim status (deadline),
// telemetry (frequent, small) over 3 FRS with a near-region cloud behind.
// prewarm_all_caches additionally preloads the map tiles at every FRS.
Scenario rescue_preset(bool prewarm_all_caches = false);
// Same deployment forced through a far-region cloud with caching disabled.
Scenario rescue_cloud_variant();

// Calibrates service/capacity/load knobs against the published endpoints,
// then sweeps robot count 1..5 per architecture and region.
ExperimentTable run_experiment_ab();
// Calibrates per-region cloud capacity, then sweeps FRS count {2,5,10,15,20}.
ExperimentTable run_experiment_c();
// Runs the rescue preset and its forced-cloud variant.
ExperimentTable run_experiment_rescue();

}  // namespace fogsim
