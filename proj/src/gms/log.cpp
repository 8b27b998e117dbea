#include "gms/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace gms::log {

namespace {

std::mutex g_mutex;
Sink g_sink; // empty = default stderr sink

} // namespace

void set_warn_sink(Sink sink) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_sink = std::move(sink);
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (g_sink) {
        g_sink(message);
    } else {
        std::cerr << "warning: " << message << "\n";
    }
}

} // namespace gms::log
