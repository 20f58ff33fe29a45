#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fogsim {

using NodeId = std::string;

// Invalid scenario or topology; raised before any simulation event executes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Role { Robot, Frs, SubFrs, CloudRegion };

const char* role_name(Role r);

// Planar coordinates in meters. The deployment area is small enough that
// flat 2-D distance is the right model.
struct Position {
  double x_m = 0.0;
  double y_m = 0.0;

  bool operator==(const Position&) const = default;
};

inline double distance_m(const Position& a, const Position& b) {
  return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

struct NodeSpec {
  NodeId id;
  Role role = Role::Robot;
  Position pos;
  double coverage_radius_m = 0.0;  // FRS/SubFRS only
  double service_time_ms = 0.0;    // per request, serving roles only
  int parallel_servers = 1;        // serving roles only
  std::size_t cache_capacity = 0;  // entries; FRS/SubFRS only

  bool serves() const { return role != Role::Robot; }
  bool is_fog() const { return role == Role::Frs || role == Role::SubFrs; }

  bool operator==(const NodeSpec&) const = default;
};

// One offloaded task. request_bytes ride every hop toward the data holder,
// response_bytes ride the way back.
struct Request {
  std::uint64_t id = 0;
  NodeId origin;
  std::string data_key;
  double request_bytes = 0.0;
  double response_bytes = 0.0;
  double issue_time_ms = 0.0;
  double deadline_ms = 0.0;  // relative to issue; 0 = no deadline
};

struct LatencyStats {
  std::size_t count = 0;
  std::size_t lost = 0;
  double min_ms = 0.0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;

  bool has_values() const { return count > 0; }
};

}  // namespace fogsim
