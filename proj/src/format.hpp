#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace udx::detail {

inline std::string fixed(double value, int decimals)
{
    // Avoid printing "-0.000000" for tiny negative rounding residue.
    const double scale = std::pow(10.0, decimals);
    if (std::round(value * scale) == 0.0) {
        value = 0.0;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

inline std::string general(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

}  // namespace udx::detail
