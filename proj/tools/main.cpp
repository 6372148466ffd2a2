#include <atomic>
#include <csignal>
#include <iostream>

#include "triage/cli/commands.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  return triage::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr, g_stop);
}
