#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogsim/routing.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/stats.hpp"
#include "fogsim/types.hpp"

namespace fogsim {

enum class EventKind {
  RequestIssued,
  HopArrived,
  ServiceStarted,
  ServiceFinished,
  RobotMoved,
  HandoverCompleted,
  SfrsSpawned,
  SimulationEnd,
};

// Events execute in strict (time_ms, seq) order; seq is a global insertion
// counter, so ties resolve by scheduling order and replays are exact.
struct Event {
  double time_ms = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::SimulationEnd;
  std::uint64_t request_id = 0;
  NodeId node;   // hop destination / serving node / moved robot / surged FRS
  NodeId node2;  // handover target
  int aux = 0;   // handover version or waypoint index
};

// FIFO multi-server queue for one serving node.
class Server {
 public:
  Server(int capacity, double service_time_ms)
      : capacity_(capacity), service_time_ms_(service_time_ms) {}

  // True when a server slot was free and service starts immediately;
  // otherwise the request waits in FIFO order.
  bool enqueue(std::uint64_t request_id);

  // Finishes one in-service request and promotes the head of the queue.
  // Returns the promoted request, which starts service now.
  std::optional<std::uint64_t> finish();

  int busy() const { return busy_; }
  int capacity() const { return capacity_; }
  double service_time_ms() const { return service_time_ms_; }
  const std::deque<std::uint64_t>& queue() const { return fifo_; }

 private:
  int capacity_;
  double service_time_ms_;
  int busy_ = 0;
  std::deque<std::uint64_t> fifo_;
};

struct TraceRecord {
  std::uint64_t request_id = 0;
  double issue_ms = 0.0;
  std::vector<NodeId> route;  // walk: origin, then each hop destination
  std::string resolution;
  bool completed = false;
  double complete_ms = 0.0;
  std::string drop_reason;  // "deadline" or "in_flight" when not completed
  double queue_wait_ms = 0.0;
  int hops = 0;
};

struct Trace {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string prng;
  std::vector<TraceRecord> records;  // ascending request id

  std::string serialize() const;
};

struct RunResult {
  Trace trace;
  LatencyStats overall;  // completed requests only
  std::map<std::string, LatencyStats> per_resolution;
  std::map<std::string, std::size_t> resolution_counts;  // planned, all issued
  std::size_t issued = 0;
  std::size_t completed = 0;
  std::size_t dropped = 0;    // deadline expiries
  std::size_t in_flight = 0;  // unresolved at SimulationEnd
  std::size_t deadline_total = 0;  // resolved deadline-bearing requests
  std::size_t deadline_met = 0;
  double deadline_met_fraction = 1.0;  // 1.0 when nothing carries a deadline
  std::vector<double> latencies_ms;    // completed, ascending request id

  // Per-node audit: ids in service-queue arrival order vs service start
  // order. Equal vectors = FIFO held everywhere.
  std::map<NodeId, std::vector<std::uint64_t>> arrival_order;
  std::map<NodeId, std::vector<std::uint64_t>> service_order;

  double mean_latency_ms() const { return overall.mean_ms; }
};

// Executes the scenario to SimulationEnd (or queue exhaustion). Throws
// ConfigError before any event executes if the scenario is invalid.
RunResult run(const Scenario& scenario);

}  // namespace fogsim
