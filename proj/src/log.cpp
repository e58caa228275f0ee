#include "fsw/log.hpp"

#include <iostream>
#include <mutex>

namespace fsw::log {

namespace {
std::mutex g_mutex;
Sink g_sink;
bool g_verbose = false;
} // namespace

void set_warning_sink(Sink sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void warn(const std::string &message) {
  std::lock_guard lock(g_mutex);
  if (g_sink)
    g_sink(message);
  else
    std::cerr << "warning: " << message << '\n';
}

void set_verbose(bool verbose) {
  std::lock_guard lock(g_mutex);
  g_verbose = verbose;
}

bool verbose() {
  std::lock_guard lock(g_mutex);
  return g_verbose;
}

void info(const std::string &message) {
  if (verbose())
    std::cerr << message << '\n';
}

} // namespace fsw::log
