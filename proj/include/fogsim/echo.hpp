#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "fogsim/probe.hpp"

namespace fogsim {

struct EchoConfig {
  std::uint16_t port = 0;  // 0 binds an ephemeral port
  Transport transport = Transport::Datagram;
  double delay_ms = 0.0;  // fixed artificial delay before each reply
};

// Echoes every payload back verbatim until stopped. Datagram mode answers
// each packet to its source address, so concurrent clients stay isolated;
// stream mode serves each connection on its own thread. Construction binds
// the socket (BindError on failure) and starts serving.
class EchoServer {
 public:
  explicit EchoServer(const EchoConfig& config);
  ~EchoServer();
  EchoServer(const EchoServer&) = delete;
  EchoServer& operator=(const EchoServer&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();  // idempotent; joins all serving threads

 private:
  void serve_datagram();
  void serve_stream();
  void serve_connection(int fd);

  EchoConfig config_;
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread loop_;
  std::vector<std::thread> sessions_;  // stream connections; touched only by loop_
};

}  // namespace fogsim
