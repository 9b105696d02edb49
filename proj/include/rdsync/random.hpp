#pragma once

#include <cstdint>
#include <string_view>

namespace rdsync {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_label(std::string_view label) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

/// Sub-seed derived from a root seed by a label and an index.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) noexcept
{
    return mix64(seed ^ hash_label(label) ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Counter-based random stream: the j-th draw of stream (seed, stream_id) is
/// a pure function of (seed, stream_id, j), so any draw is addressable
/// without generating the ones before it.
class CounterStream {
public:
    constexpr CounterStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_(mix64(seed ^ mix64(stream_id * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL)))
    {
    }

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept
    {
        return mix64(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter) const noexcept
    {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
};

/// Sequential cursor over a CounterStream, for code that consumes draws in order.
class StreamCursor {
public:
    constexpr StreamCursor(std::uint64_t seed, std::uint64_t stream_id) noexcept : stream_(seed, stream_id) {}

    constexpr double uniform() noexcept { return stream_.uniform(next_++); }
    constexpr std::uint64_t bits() noexcept { return stream_.bits(next_++); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept;
    /// Standard normal (Box-Muller; consumes two draws).
    double normal() noexcept;

private:
    CounterStream stream_;
    std::uint64_t next_ = 0;
};

} // namespace rdsync
