#pragma once

#include <limits>

#include "fogsim/rng.hpp"
#include "fogsim/types.hpp"

namespace fogsim {

inline constexpr double kUnlimitedBandwidth = std::numeric_limits<double>::infinity();

// Propagation delay for one direction of a link. Either a fixed value or a
// shifted exponential fit to (min, avg, max), truncated at max by resampling.
struct LatencyModel {
  enum class Kind { Constant, Empirical };

  Kind kind = Kind::Constant;
  double min_ms = 0.0;
  double avg_ms = 0.0;
  double max_ms = 0.0;

  static LatencyModel constant(double ms);
  static LatencyModel empirical(double min_ms, double avg_ms, double max_ms);

  bool is_constant() const { return kind == Kind::Constant; }
  double lower_bound_ms() const { return min_ms; }

  bool operator==(const LatencyModel&) const = default;
};

struct LinkSpec {
  NodeId a;
  NodeId b;
  LatencyModel one_way;  // same model both directions
  double bandwidth_bytes_per_s = kUnlimitedBandwidth;

  bool operator==(const LinkSpec&) const = default;
};

// Constant models consume no RNG draws, so adding or removing them from a
// scenario never shifts the random stream of anything else.
double sample_latency(const LatencyModel& model, Rng& rng);

// One-direction traversal time: propagation + serialization.
double hop_delay(const LinkSpec& link, double payload_bytes, Rng& rng);

}  // namespace fogsim
