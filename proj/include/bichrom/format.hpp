#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bichrom {

/// Shortest decimal representation that parses back to exactly the same
/// double (round-trip formatting).
inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double out{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("parse_double: bad number '" + std::string(s) + "'");
    return out;
}

}  // namespace bichrom
