#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace slce {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_real(double value)
{
    if (value == 0.0) return "0";  // folds -0 into 0
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

} // namespace slce
