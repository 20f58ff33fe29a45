#include "fogsim/echo.hpp"

#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>

namespace fogsim {

namespace {

// How often serving loops wake to check the stop flag.
constexpr int kPollTickMs = 50;

void sleep_ms(double ms) {
  if (ms > 0.0) {
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
  }
}

bool send_all(int fd, const std::uint8_t* data, std::size_t len) {
  std::size_t off = 0;
  while (off < len) {
    ssize_t n = ::send(fd, data + off, len - off, MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

EchoServer::EchoServer(const EchoConfig& config) : config_(config) {
  int socktype =
      config_.transport == Transport::Datagram ? SOCK_DGRAM : SOCK_STREAM;
  fd_ = ::socket(AF_INET, socktype, 0);
  if (fd_ < 0) {
    throw BindError(std::string("cannot create echo socket: ") +
                    std::strerror(errno));
  }
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(config_.port);
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    int err = errno;
    ::close(fd_);
    fd_ = -1;
    throw BindError("cannot bind echo port " + std::to_string(config_.port) +
                    ": " + std::strerror(err));
  }

  sockaddr_in bound{};
  socklen_t blen = sizeof(bound);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &blen) != 0) {
    int err = errno;
    ::close(fd_);
    fd_ = -1;
    throw BindError(std::string("cannot read bound echo port: ") +
                    std::strerror(err));
  }
  port_ = ntohs(bound.sin_port);

  if (config_.transport == Transport::Stream) {
    if (::listen(fd_, 16) != 0) {
      int err = errno;
      ::close(fd_);
      fd_ = -1;
      throw BindError(std::string("cannot listen on echo socket: ") +
                      std::strerror(err));
    }
    loop_ = std::thread([this] { serve_stream(); });
  } else {
    loop_ = std::thread([this] { serve_datagram(); });
  }
}

EchoServer::~EchoServer() { stop(); }

void EchoServer::stop() {
  bool was = stopping_.exchange(true);
  if (!was) {
    if (loop_.joinable()) loop_.join();
    for (std::thread& t : sessions_) {
      if (t.joinable()) t.join();
    }
    sessions_.clear();
  }
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void EchoServer::serve_datagram() {
  std::vector<std::uint8_t> buf(65536);
  while (!stopping_.load()) {
    pollfd p{fd_, POLLIN, 0};
    int pr = ::poll(&p, 1, kPollTickMs);
    if (pr <= 0) continue;  // tick or transient error; recheck the flag
    sockaddr_storage src{};
    socklen_t slen = sizeof(src);
    ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0,
                           reinterpret_cast<sockaddr*>(&src), &slen);
    if (n <= 0) continue;
    sleep_ms(config_.delay_ms);
    ::sendto(fd_, buf.data(), static_cast<std::size_t>(n), 0,
             reinterpret_cast<const sockaddr*>(&src), slen);
  }
}

void EchoServer::serve_stream() {
  while (!stopping_.load()) {
    pollfd p{fd_, POLLIN, 0};
    int pr = ::poll(&p, 1, kPollTickMs);
    if (pr <= 0) continue;
    int conn = ::accept(fd_, nullptr, nullptr);
    if (conn < 0) continue;
    sessions_.emplace_back([this, conn] { serve_connection(conn); });
  }
}

void EchoServer::serve_connection(int fd) {
  std::uint8_t buf[4096];
  while (!stopping_.load()) {
    pollfd p{fd, POLLIN, 0};
    int pr = ::poll(&p, 1, kPollTickMs);
    if (pr < 0) break;
    if (pr == 0) continue;
    ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
    if (n <= 0) break;  // peer closed or errored
    sleep_ms(config_.delay_ms);
    if (!send_all(fd, buf, static_cast<std::size_t>(n))) break;
  }
  ::close(fd);
}

}  // namespace fogsim
