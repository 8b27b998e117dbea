#pragma once

#include <functional>
#include <string>

namespace gms::log {

using Sink = std::function<void(const std::string&)>;

/// Replace the warning sink. Passing nullptr restores the default (stderr).
/// Tests use this to capture warnings; the CLI uses it to tee into a log file.
void set_warn_sink(Sink sink);

/// Emit a warning through the current sink.
void warn(const std::string& message);

} // namespace gms::log
