#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogsim/types.hpp"

namespace fogsim {

enum class Transport { Datagram, Stream };

struct ProbeConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  Transport transport = Transport::Datagram;
  int count = 20;
  std::size_t payload_bytes = 64;  // >= 36
  double interval_ms = 200.0;      // send-to-send pacing
  double timeout_ms = 1000.0;      // per-packet reply window
};

struct ProbeResult {
  LatencyStats stats;  // count 0 when every packet was lost
  std::size_t lost = 0;
  std::vector<double> raw_rtts_ms;  // completed round trips, send order
};

// Hostname did not resolve.
struct ResolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Local socket could not be created, bound, or configured.
struct BindError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sends count frames at the configured pace and matches echoes by sequence
// number. RTTs come from the sender's monotonic clock; a reply past its
// window counts as lost, and late or duplicate echoes are discarded. A
// stream connection that is refused or drops reports the remaining packets
// as lost rather than throwing.
ProbeResult probe(const ProbeConfig& config);

}  // namespace fogsim
