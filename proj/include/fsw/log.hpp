#pragma once

#include <functional>
#include <string>

namespace fsw::log {

using Sink = std::function<void(const std::string &)>;

// Warnings go to stderr unless a sink is installed. Passing an empty
// function restores the default.
void set_warning_sink(Sink sink);
void warn(const std::string &message);

void set_verbose(bool verbose);
bool verbose();
void info(const std::string &message);

} // namespace fsw::log
