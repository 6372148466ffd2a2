#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "triage/sim/world.hpp"

namespace triage::service {

struct LiveOptions {
  /// Simulated seconds per wall second; 0 runs unpaced.
  double pace{1.0};
  /// Snapshots per simulated second.
  double snapshot_rate{5.0};
  bool auto_policy{true};
};

using Frame = std::shared_ptr<const std::string>;

/// Runs a World on its own thread. The loop is the only writer: commands are
/// queued and applied at the next step boundary, and subscribers receive
/// serialized snapshots built on the loop thread.
class LiveSim {
 public:
  using Subscriber = std::function<void(Frame)>;
  using AckFn = std::function<void(const sim::CommandResult&, std::optional<long> step)>;

  LiveSim(sim::Scenario scenario, LiveOptions options);
  ~LiveSim();
  LiveSim(const LiveSim&) = delete;
  LiveSim& operator=(const LiveSim&) = delete;

  void start();
  /// Stops the loop early; the world is not finished.
  void stop();
  /// Blocks until the run has finished or was stopped.
  void wait();
  bool done() const;

  /// Queues a command. `ack` runs on the loop thread once the command has
  /// been applied or rejected.
  void submit(sim::Command cmd, AckFn ack);

  /// Registers a subscriber and hands it the latest snapshot immediately,
  /// under the same lock that orders later snapshots.
  std::uint64_t subscribe(Subscriber fn);
  void unsubscribe(std::uint64_t token);

  long steps_per_snapshot() const { return snapshot_every_; }
  double sim_time() const;
  const sim::Scenario& scenario() const { return scenario_; }
  /// Valid after wait().
  std::string event_log_text() const;

 private:
  struct Queued {
    sim::Command cmd;
    AckFn ack;
  };

  void loop();
  void drain_commands();
  void publish(bool finished);

  sim::Scenario scenario_;
  LiveOptions options_;
  long snapshot_every_{1};
  std::unique_ptr<sim::World> world_;

  mutable std::mutex queue_mutex_;
  std::deque<Queued> queue_;

  mutable std::mutex sub_mutex_;
  std::map<std::uint64_t, Subscriber> subscribers_;
  std::uint64_t next_token_{1};
  Frame latest_;
  long seq_{0};

  mutable std::mutex state_mutex_;
  std::condition_variable done_cv_;
  bool done_{false};
  bool stop_{false};
  double sim_time_{0.0};

  std::thread thread_;
};

}  // namespace triage::service
