#pragma once

/// @file tcp.hpp
/// @brief Plain TCP byte streams for the protocol channels.

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "mpsi/channel.hpp"

namespace mpsi {

/// Listening socket bound to host:port. Port 0 picks an ephemeral port.
class TcpListener {
 public:
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  /// Blocks until a peer connects or the timeout elapses (ProtocolError).
  std::unique_ptr<Channel> accept(std::chrono::milliseconds timeout);
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Connects to host:port, retrying refused connections until the deadline.
std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port,
                                     std::chrono::milliseconds timeout);

}  // namespace mpsi
