#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fogsim/scenario.hpp"

namespace fogsim {

// A parameter the fitter may move, addressed by path:
//   node:<id>.service_time_ms        node:<id>.parallel_servers
//   role:<frs|sub_frs|cloud_region>.service_time_ms / .parallel_servers
//   links.<robot_robot|robot_fog|fog_fog|fog_cloud>.one_way_ms
//   workload.interval_ms             workload.rate_rps
//   policy.d2d_internal_lag_ms
struct Knob {
  std::string path;
  double lo = 0.0;
  double hi = 0.0;
  bool integer = false;  // scanned ascending instead of bisected
};

// One fitting goal: drive the scenario's mean completed latency to
// target_ms. The scenario carries every parameter held fixed.
struct CalibrationTarget {
  std::string label;
  Scenario scenario;
  double target_ms = 0.0;
  double tolerance_fraction = 0.01;  // (0, 1]
};

struct FittedKnob {
  std::string path;
  std::string label;  // target this knob was fitted against
  double value = 0.0;
  double achieved_ms = 0.0;
  int evaluations = 0;  // simulation runs spent on this knob
};

struct CalibrationResult {
  std::vector<FittedKnob> fitted;
};

class CalibrationError : public std::runtime_error {
 public:
  enum class Kind { Unbracketable, NonMonotone, NotConverged };

  CalibrationError(Kind kind, const std::string& knob, const std::string& message)
      : std::runtime_error(message), kind_(kind), knob_(knob) {}

  Kind kind() const { return kind_; }
  const std::string& knob() const { return knob_; }

 private:
  Kind kind_;
  std::string knob_;
};

// Reads the knob's current value; throws ConfigError for unknown paths or
// paths that match nothing in the scenario.
double read_knob(const Scenario& s, const std::string& path);

// Writes the knob into every matching element (link paths switch the
// model to Constant(value)).
void apply_knob(Scenario& s, const std::string& path, double value);

// Pairs targets with knobs in order. A target normally consumes one
// continuous knob (bisected); it consumes two when an integer knob is
// followed by a continuous one — the integer value is scanned ascending
// until the continuous range brackets the target, then bisected. Knob
// values fitted earlier are applied to the scenarios of later targets.
//
// The current knob value is evaluated first, so a target already within
// tolerance returns unchanged after one run. Endpoint and midpoint probes
// must order consistently (ties allowed) or NonMonotone is thrown;
// endpoints that do not straddle the target throw Unbracketable; more
// than 60 bisection steps without reaching tolerance throw NotConverged.
CalibrationResult calibrate(const std::vector<CalibrationTarget>& targets,
                            const std::vector<Knob>& knobs);

}  // namespace fogsim
