#pragma once

#include <cstddef>
#include <vector>

#include "fogsim/types.hpp"

namespace fogsim {

// Order statistics use linear interpolation between closest ranks
// (position p * (n - 1)), so [1,2,3,4] has median 2.5.
LatencyStats summarize(std::vector<double> samples_ms, std::size_t lost = 0);

}  // namespace fogsim
