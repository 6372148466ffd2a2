#include "triage/service/live_sim.hpp"

#include <chrono>
#include <cmath>

#include "triage/service/protocol.hpp"

namespace triage::service {

LiveSim::LiveSim(sim::Scenario scenario, LiveOptions options)
    : scenario_(std::move(scenario)), options_(options) {
  if (options_.pace < 0.0 || options_.snapshot_rate <= 0.0) {
    throw std::invalid_argument("pace must be >= 0 and snapshot_rate > 0");
  }
  snapshot_every_ = std::max(1L, std::lround(1.0 / (options_.snapshot_rate * scenario_.dt)));
  world_ = std::make_unique<sim::World>(scenario_, options_.auto_policy);
  publish(false);
}

LiveSim::~LiveSim() {
  stop();
  if (thread_.joinable()) thread_.join();
}

void LiveSim::start() {
  if (thread_.joinable()) return;
  thread_ = std::thread([this] { loop(); });
}

void LiveSim::stop() {
  std::lock_guard lock(state_mutex_);
  stop_ = true;
}

void LiveSim::wait() {
  std::unique_lock lock(state_mutex_);
  done_cv_.wait(lock, [this] { return done_; });
}

bool LiveSim::done() const {
  std::lock_guard lock(state_mutex_);
  return done_;
}

double LiveSim::sim_time() const {
  std::lock_guard lock(state_mutex_);
  return sim_time_;
}

void LiveSim::submit(sim::Command cmd, AckFn ack) {
  std::unique_lock lock(state_mutex_);
  if (done_) {
    lock.unlock();
    ack({false, "finished"}, std::nullopt);
    return;
  }
  std::lock_guard qlock(queue_mutex_);
  queue_.push_back({std::move(cmd), std::move(ack)});
}

std::uint64_t LiveSim::subscribe(Subscriber fn) {
  std::lock_guard lock(sub_mutex_);
  const auto token = next_token_++;
  fn(latest_);
  subscribers_.emplace(token, std::move(fn));
  return token;
}

void LiveSim::unsubscribe(std::uint64_t token) {
  std::lock_guard lock(sub_mutex_);
  subscribers_.erase(token);
}

std::string LiveSim::event_log_text() const { return world_->event_log_text(); }

void LiveSim::drain_commands() {
  std::deque<Queued> batch;
  {
    std::lock_guard lock(queue_mutex_);
    batch.swap(queue_);
  }
  for (auto& q : batch) {
    const auto result = world_->apply(q.cmd);
    q.ack(result, world_->step_index());
  }
}

void LiveSim::publish(bool finished) {
  auto frame = std::make_shared<const std::string>(snapshot_json(*world_, seq_++, finished).dump());
  std::lock_guard lock(sub_mutex_);
  latest_ = frame;
  for (auto& [token, fn] : subscribers_) fn(frame);
}

// Snapshots show the state at the end of a step. Commands follow at the same
// boundary, in the order run_headless applies them.
void LiveSim::loop() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto wall_per_step =
      options_.pace > 0.0 ? std::chrono::duration<double>(scenario_.dt / options_.pace) : std::chrono::duration<double>(0);
  bool stopped = false;
  while (true) {
    {
      std::lock_guard lock(state_mutex_);
      stopped = stop_;
    }
    if (stopped) break;
    if (world_->step_index() > 0 && world_->step_index() % snapshot_every_ == 0) publish(false);
    drain_commands();
    if (world_->finished()) break;
    world_->step();
    {
      std::lock_guard lock(state_mutex_);
      sim_time_ = world_->time();
    }
    if (options_.pace > 0.0) {
      std::this_thread::sleep_until(t0 + std::chrono::duration_cast<clock::duration>(wall_per_step * world_->step_index()));
    }
  }
  if (!stopped) {
    world_->finish();
    publish(true);
  }
  std::deque<Queued> rejected;
  {
    std::lock_guard lock(state_mutex_);
    done_ = true;
    std::lock_guard qlock(queue_mutex_);
    rejected.swap(queue_);
  }
  for (auto& q : rejected) q.ack({false, "finished"}, std::nullopt);
  done_cv_.notify_all();
}

}  // namespace triage::service
