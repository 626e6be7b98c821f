#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace copsel {

/// Shortest round-trip decimal for a double; stable across runs.
inline std::string fmt_g(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

/// "K"-unit rendering with one decimal, e.g. 43600 -> "43.6K".
inline std::string fmt_kilo(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1fK", v / 1000.0);
    return buf;
}

} // namespace copsel
