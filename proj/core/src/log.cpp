#include "relctl/log.hpp"

#include <atomic>
#include <cstdio>

namespace relctl::log {

namespace {
std::atomic<bool> g_quiet{false};
}

void warn(std::string_view msg) {
  if (g_quiet.load(std::memory_order_relaxed)) return;
  std::fprintf(stderr, "[relctl] warning: %.*s\n", static_cast<int>(msg.size()), msg.data());
}

void set_quiet(bool quiet) { g_quiet.store(quiet, std::memory_order_relaxed); }

bool quiet() { return g_quiet.load(std::memory_order_relaxed); }

} // namespace relctl::log
