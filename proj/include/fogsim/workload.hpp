#pragma once

#include <vector>

#include "fogsim/scenario.hpp"
#include "fogsim/types.hpp"

namespace fogsim {

// Expands every stream into concrete requests, sorted by
// (issue time, robot id, stream index) with ids assigned in that order.
// Deterministic for a given scenario: each (robot, stream) pair draws from
// its own forked RNG, independent of container iteration order.
std::vector<Request> generate_workload(const Scenario& s);

}  // namespace fogsim
