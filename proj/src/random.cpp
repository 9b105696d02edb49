#include "rdsync/random.hpp"

#include <cmath>
#include <numbers>

namespace rdsync {

std::uint64_t StreamCursor::below(std::uint64_t n) noexcept
{
    // Lemire's multiply-shift; the bias is below 2^-64 * n and irrelevant here.
    const unsigned __int128 m = static_cast<unsigned __int128>(bits()) * n;
    return static_cast<std::uint64_t>(m >> 64);
}

double StreamCursor::normal() noexcept
{
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace rdsync
