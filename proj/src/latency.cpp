#include "fogsim/latency.hpp"

#include <cassert>

namespace fogsim {

LatencyModel LatencyModel::constant(double ms) {
  assert(ms >= 0.0);
  LatencyModel m;
  m.kind = Kind::Constant;
  m.min_ms = m.avg_ms = m.max_ms = ms;
  return m;
}

LatencyModel LatencyModel::empirical(double min_ms, double avg_ms, double max_ms) {
  assert(min_ms >= 0.0 && min_ms <= avg_ms && avg_ms <= max_ms);
  LatencyModel m;
  m.kind = Kind::Empirical;
  m.min_ms = min_ms;
  m.avg_ms = avg_ms;
  m.max_ms = max_ms;
  return m;
}

double sample_latency(const LatencyModel& model, Rng& rng) {
  if (model.kind == LatencyModel::Kind::Constant) return model.min_ms;
  const double spread = model.avg_ms - model.min_ms;
  if (spread <= 0.0) return model.min_ms;  // degenerate (min = avg = max)
  // Shifted exponential, truncated at max by resampling.
  for (;;) {
    double v = model.min_ms + rng.exponential(spread);
    if (v <= model.max_ms) return v;
  }
}

double hop_delay(const LinkSpec& link, double payload_bytes, Rng& rng) {
  double d = sample_latency(link.one_way, rng);
  if (link.bandwidth_bytes_per_s != kUnlimitedBandwidth)
    d += 1000.0 * payload_bytes / link.bandwidth_bytes_per_s;
  return d;
}

}  // namespace fogsim
