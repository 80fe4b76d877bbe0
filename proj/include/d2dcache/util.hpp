#pragma once

#include <charconv>
#include <string>

namespace d2dcache {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

/// Shortest round-trip decimal form, '.' separator, locale independent.
inline std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace d2dcache
