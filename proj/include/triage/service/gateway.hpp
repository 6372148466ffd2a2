#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "triage/service/live_sim.hpp"

namespace triage::service {

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GatewayOptions {
  std::string address{"127.0.0.1"};
  /// 0 picks a free port.
  std::uint16_t port{8700};
  int threads{2};
  /// Outgoing frames a client may have queued before it is disconnected.
  std::size_t max_backlog{4096};
  std::string scenario_name;
};

/// HTTP and WebSocket front end on one port: GET /health and /ws.
class Gateway {
 public:
  Gateway(LiveSim& sim, GatewayOptions options);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Binds and starts serving. Throws BindError.
  void start();
  void stop();
  std::uint16_t port() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace triage::service
