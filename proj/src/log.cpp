#include "methane/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

namespace methane::log {
namespace {

std::atomic<Level> g_level{Level::kWarning};
std::mutex g_mutex;
std::function<void(Level, std::string_view)> g_sink;

const char* label(Level level) {
  switch (level) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarning: return "warning";
    case Level::kError: return "error";
    case Level::kOff: break;
  }
  return "";
}

}  // namespace

void set_level(Level l) { g_level = l; }
Level level() { return g_level; }

void set_sink(std::function<void(Level, std::string_view)> sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void write(Level l, std::string_view message) {
  if (l < g_level.load()) return;
  std::lock_guard lock(g_mutex);
  if (g_sink) {
    g_sink(l, message);
    return;
  }
  std::cerr << "[" << label(l) << "] " << message << '\n';
}

}  // namespace methane::log
