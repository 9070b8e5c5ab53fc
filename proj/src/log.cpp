#include "mfl/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace mfl {
namespace {

std::atomic<bool> g_quiet{false};
std::mutex g_log_mutex;

}  // namespace

void set_quiet(bool quiet) { g_quiet = quiet; }
bool quiet() { return g_quiet; }

void warn(std::string_view message) {
  if (g_quiet) return;
  std::lock_guard lock(g_log_mutex);
  std::cerr << "warning: " << message << '\n';
}

void info(std::string_view message) {
  if (g_quiet) return;
  std::lock_guard lock(g_log_mutex);
  std::cerr << message << '\n';
}

}  // namespace mfl
