#include "fogsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fogsim {

namespace {

double quantile(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double pos = p * static_cast<double>(n - 1);
  auto lo = static_cast<std::size_t>(pos);
  if (lo >= n - 1) return sorted[n - 1];
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

LatencyStats summarize(std::vector<double> samples_ms, std::size_t lost) {
  LatencyStats st;
  st.lost = lost;
  st.count = samples_ms.size();
  if (samples_ms.empty()) return st;

  std::sort(samples_ms.begin(), samples_ms.end());
  st.min_ms = samples_ms.front();
  st.max_ms = samples_ms.back();
  st.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) /
               static_cast<double>(samples_ms.size());
  st.median_ms = quantile(samples_ms, 0.5);
  st.p95_ms = quantile(samples_ms, 0.95);
  return st;
}

}  // namespace fogsim
