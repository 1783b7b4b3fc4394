#pragma once

#include <charconv>
#include <string>

namespace reprank::detail {

/// Shortest decimal form that re-reads bit-identically, so serialized values
/// survive a round trip and simple ones print as written (0.1, not 0.100...01).
inline std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

} // namespace reprank::detail
