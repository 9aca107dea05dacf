#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "tamatrack/errors.hpp"

namespace tamatrack {

/// Shortest decimal form that parses back to the exact same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Strict full-token double parse; `ok` reports whether the whole token was
/// consumed.
inline double parse_double(std::string_view token, bool& ok) {
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    ok = res.ec == std::errc{} && res.ptr == token.data() + token.size() && !token.empty();
    return v;
}

inline long parse_long(std::string_view token, bool& ok) {
    long v = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    ok = res.ec == std::errc{} && res.ptr == token.data() + token.size() && !token.empty();
    return v;
}

}  // namespace tamatrack
