#include "fogsim/probe.hpp"

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "fogsim/frame.hpp"
#include "fogsim/stats.hpp"

namespace fogsim {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t mono_ns(Clock::time_point t) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch())
          .count());
}

double ms_between(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double, std::milli>(to - from).count();
}

// Remaining window as a poll() timeout, never negative, rounded up so a
// sliver of time left still gets one poll.
int poll_ms_until(Clock::time_point deadline) {
  double left = ms_between(Clock::now(), deadline);
  if (left <= 0.0) return 0;
  return static_cast<int>(std::ceil(left));
}

struct Resolved {
  sockaddr_storage addr{};
  socklen_t len = 0;
  int family = AF_UNSPEC;
};

Resolved resolve(const std::string& host, std::uint16_t port, int socktype) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = socktype;
  addrinfo* res = nullptr;
  std::string service = std::to_string(port);
  int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0 || res == nullptr) {
    throw ResolveError("cannot resolve host '" + host +
                       "': " + ::gai_strerror(rc));
  }
  Resolved out;
  out.len = static_cast<socklen_t>(res->ai_addrlen);
  out.family = res->ai_family;
  std::memcpy(&out.addr, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  return out;
}

struct Fd {
  int fd = -1;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

void validate(const ProbeConfig& c) {
  if (c.count < 1) throw ConfigError("probe count must be at least 1");
  if (c.payload_bytes < kMinProbePayloadBytes) {
    throw ConfigError("probe payload_bytes must be at least " +
                      std::to_string(kMinProbePayloadBytes));
  }
  if (c.payload_bytes > 65000) {
    throw ConfigError("probe payload_bytes must be at most 65000");
  }
  if (!(c.interval_ms >= 0.0)) throw ConfigError("probe interval_ms must be >= 0");
  if (!(c.timeout_ms > 0.0)) throw ConfigError("probe timeout_ms must be > 0");
}

// Waits within [now, deadline) for the echo of `seq` on a datagram socket.
// Anything else that arrives (stale echo, duplicate, junk) is discarded.
bool await_datagram_echo(int fd, std::uint32_t seq, Clock::time_point deadline,
                         std::size_t payload_bytes, Clock::time_point sent_at,
                         double* rtt_ms) {
  std::vector<std::uint8_t> buf(payload_bytes + 256);
  for (;;) {
    int wait = poll_ms_until(deadline);
    if (wait <= 0 && Clock::now() >= deadline) return false;
    pollfd p{fd, POLLIN, 0};
    int pr = ::poll(&p, 1, wait);
    if (pr < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (pr == 0) return false;  // window expired
    ssize_t n = ::recv(fd, buf.data(), buf.size(), 0);
    Clock::time_point got_at = Clock::now();
    if (n <= 0) continue;  // transient error; keep waiting out the window
    auto f = decode_frame(buf.data(), static_cast<std::size_t>(n));
    if (!f || f->sequence != seq) continue;  // late or duplicate: discard
    *rtt_ms = ms_between(sent_at, got_at);
    return true;
  }
}

ProbeResult probe_datagram(const ProbeConfig& c, const Resolved& dst) {
  Fd sock;
  sock.fd = ::socket(dst.family, SOCK_DGRAM, 0);
  if (sock.fd < 0) {
    throw BindError(std::string("cannot create datagram socket: ") +
                    std::strerror(errno));
  }

  ProbeResult out;
  auto interval = std::chrono::duration<double, std::milli>(c.interval_ms);
  auto timeout = std::chrono::duration<double, std::milli>(c.timeout_ms);

  for (int i = 0; i < c.count; ++i) {
    Clock::time_point sent_at = Clock::now();
    ProbeFrame f;
    f.sequence = static_cast<std::uint32_t>(i);
    f.send_timestamp_ns = mono_ns(sent_at);
    std::vector<std::uint8_t> wire = encode_frame(f, c.payload_bytes);

    ssize_t sent = ::sendto(sock.fd, wire.data(), wire.size(), 0,
                            reinterpret_cast<const sockaddr*>(&dst.addr),
                            dst.len);
    double rtt = 0.0;
    bool got = false;
    if (sent == static_cast<ssize_t>(wire.size())) {
      got = await_datagram_echo(
          sock.fd, f.sequence,
          sent_at + std::chrono::duration_cast<Clock::duration>(timeout),
          c.payload_bytes, sent_at, &rtt);
    }
    if (got) {
      out.raw_rtts_ms.push_back(rtt);
    } else {
      ++out.lost;
    }

    if (i + 1 < c.count) {
      std::this_thread::sleep_until(
          sent_at + std::chrono::duration_cast<Clock::duration>(interval));
    }
  }

  out.stats = summarize(out.raw_rtts_ms, out.lost);
  return out;
}

// Stream frames ride a 4-byte big-endian length prefix.
std::vector<std::uint8_t> stream_wire(const ProbeFrame& f, std::size_t payload_bytes) {
  std::vector<std::uint8_t> body = encode_frame(f, payload_bytes);
  std::vector<std::uint8_t> wire;
  wire.reserve(4 + body.size());
  std::uint32_t len = static_cast<std::uint32_t>(body.size());
  wire.push_back(static_cast<std::uint8_t>(len >> 24));
  wire.push_back(static_cast<std::uint8_t>(len >> 16));
  wire.push_back(static_cast<std::uint8_t>(len >> 8));
  wire.push_back(static_cast<std::uint8_t>(len));
  wire.insert(wire.end(), body.begin(), body.end());
  return wire;
}

bool send_all(int fd, const std::uint8_t* data, std::size_t len) {
  std::size_t off = 0;
  while (off < len) {
    ssize_t n = ::send(fd, data + off, len - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        pollfd p{fd, POLLOUT, 0};
        if (::poll(&p, 1, 1000) <= 0) return false;
        continue;
      }
      return false;
    }
    if (n == 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

// Non-blocking connect bounded by timeout_ms. False on refusal or timeout.
bool connect_within(int fd, const Resolved& dst, double timeout_ms) {
  int rc = ::connect(fd, reinterpret_cast<const sockaddr*>(&dst.addr), dst.len);
  if (rc == 0) return true;
  if (errno != EINPROGRESS) return false;
  Clock::time_point deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double, std::milli>(timeout_ms));
  for (;;) {
    int wait = poll_ms_until(deadline);
    if (wait <= 0 && Clock::now() >= deadline) return false;
    pollfd p{fd, POLLOUT, 0};
    int pr = ::poll(&p, 1, wait);
    if (pr < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (pr == 0) return false;
    int err = 0;
    socklen_t elen = sizeof(err);
    if (::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &elen) != 0) return false;
    return err == 0;
  }
}

// Pulls length-prefixed frames out of `buf` until one matches `seq` or the
// window closes. Non-matching frames are discarded; a broken connection or
// an absurd length prefix flips *dead.
bool await_stream_echo(int fd, std::uint32_t seq, Clock::time_point deadline,
                       Clock::time_point sent_at, std::vector<std::uint8_t>& buf,
                       double* rtt_ms, bool* dead) {
  std::uint8_t chunk[4096];
  for (;;) {
    // Drain complete frames already buffered.
    while (buf.size() >= 4) {
      std::uint32_t len = (static_cast<std::uint32_t>(buf[0]) << 24) |
                          (static_cast<std::uint32_t>(buf[1]) << 16) |
                          (static_cast<std::uint32_t>(buf[2]) << 8) |
                          static_cast<std::uint32_t>(buf[3]);
      if (len < kFrameHeaderBytes || len > 1u << 20) {
        *dead = true;  // stream out of sync; no recovery
        return false;
      }
      if (buf.size() < 4 + len) break;
      auto f = decode_frame(buf.data() + 4, len);
      Clock::time_point got_at = Clock::now();
      buf.erase(buf.begin(), buf.begin() + 4 + len);
      if (f && f->sequence == seq) {
        *rtt_ms = ms_between(sent_at, got_at);
        return true;
      }
      // Late or duplicate echo: discard and keep looking.
    }

    int wait = poll_ms_until(deadline);
    if (wait <= 0 && Clock::now() >= deadline) return false;
    pollfd p{fd, POLLIN, 0};
    int pr = ::poll(&p, 1, wait);
    if (pr < 0) {
      if (errno == EINTR) continue;
      *dead = true;
      return false;
    }
    if (pr == 0) return false;  // window expired
    ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n == 0) {
      *dead = true;  // peer closed
      return false;
    }
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK) continue;
      *dead = true;
      return false;
    }
    buf.insert(buf.end(), chunk, chunk + n);
  }
}

ProbeResult probe_stream(const ProbeConfig& c, const Resolved& dst) {
  ProbeResult out;
  auto interval = std::chrono::duration<double, std::milli>(c.interval_ms);
  auto timeout = std::chrono::duration<double, std::milli>(c.timeout_ms);

  Fd sock;
  sock.fd = ::socket(dst.family, SOCK_STREAM | SOCK_NONBLOCK, 0);
  if (sock.fd < 0) {
    throw BindError(std::string("cannot create stream socket: ") +
                    std::strerror(errno));
  }
  if (!connect_within(sock.fd, dst, c.timeout_ms)) {
    // Nothing listening (or too slow): the whole probe is lost, not an error.
    out.lost = static_cast<std::size_t>(c.count);
    out.stats = summarize(out.raw_rtts_ms, out.lost);
    return out;
  }

  std::vector<std::uint8_t> rxbuf;
  bool dead = false;
  for (int i = 0; i < c.count; ++i) {
    Clock::time_point sent_at = Clock::now();
    if (!dead) {
      ProbeFrame f;
      f.sequence = static_cast<std::uint32_t>(i);
      f.send_timestamp_ns = mono_ns(sent_at);
      std::vector<std::uint8_t> wire = stream_wire(f, c.payload_bytes);
      if (!send_all(sock.fd, wire.data(), wire.size())) dead = true;
    }

    double rtt = 0.0;
    bool got = false;
    if (!dead) {
      got = await_stream_echo(
          sock.fd, static_cast<std::uint32_t>(i),
          sent_at + std::chrono::duration_cast<Clock::duration>(timeout),
          sent_at, rxbuf, &rtt, &dead);
    }
    if (got) {
      out.raw_rtts_ms.push_back(rtt);
    } else {
      ++out.lost;
    }

    if (i + 1 < c.count && !dead) {
      std::this_thread::sleep_until(
          sent_at + std::chrono::duration_cast<Clock::duration>(interval));
    }
  }

  out.stats = summarize(out.raw_rtts_ms, out.lost);
  return out;
}

}  // namespace

ProbeResult probe(const ProbeConfig& config) {
  validate(config);
  int socktype =
      config.transport == Transport::Datagram ? SOCK_DGRAM : SOCK_STREAM;
  Resolved dst = resolve(config.host, config.port, socktype);
  if (config.transport == Transport::Datagram) {
    return probe_datagram(config, dst);
  }
  return probe_stream(config, dst);
}

}  // namespace fogsim
