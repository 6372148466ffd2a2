#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "triage/sim/world.hpp"

namespace triage::service {

inline constexpr int kProtoVersion = 1;

/// A client message that cannot be turned into a command. `id` is the
/// command id when one could be read.
class MalformedMessage : public std::runtime_error {
 public:
  MalformedMessage(std::optional<std::string> id, const std::string& what)
      : std::runtime_error(what), id_(std::move(id)) {}
  const std::optional<std::string>& id() const { return id_; }

 private:
  std::optional<std::string> id_;
};

/// Full state of the world at its current step boundary.
nlohmann::json snapshot_json(const sim::World& world, long seq, bool finished);

/// Parses a `{"type": "command", ...}` frame. Throws MalformedMessage.
sim::Command parse_command(const std::string& text);

nlohmann::json ack_json(const std::optional<std::string>& id, const sim::CommandResult& result,
                        std::optional<long> step);

nlohmann::json health_json(const std::string& scenario_name, double sim_time, bool finished);

const char* version();

}  // namespace triage::service
