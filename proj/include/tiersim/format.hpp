#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace tiersim {

// Shortest decimal string that round-trips the exact double. Every emitted
// artifact (CSV, SVG, timeline) goes through this one formatter so equal
// values always print identically.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    }
    return std::string(buf, ptr);
}

// Fixed one-decimal rendering for percentage deltas.
inline std::string format_percent(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return std::string(buf);
}

} // namespace tiersim
