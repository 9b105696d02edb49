#pragma once

// Small hand-rolled generators for property tests.

#include <cstdint>
#include <vector>

#include "rdsync/order.hpp"
#include "rdsync/random.hpp"

namespace rdsync::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed, std::uint64_t stream = 0) : cur_(seed, stream) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * cur_.uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(cur_.below(n)); }
    double normal() { return cur_.normal(); }

    Point point(std::size_t k, double lo = -1.0, double hi = 1.0)
    {
        Point p(k);
        for (auto& v : p)
            v = uniform(lo, hi);
        return p;
    }

    Box box(std::size_t k, double lo = -2.0, double hi = 2.0)
    {
        Point a = point(k, lo, hi), b = point(k, lo, hi);
        for (std::size_t i = 0; i < k; ++i)
            if (a[i] > b[i])
                std::swap(a[i], b[i]);
        return {a, b};
    }

    std::vector<std::size_t> subset(std::size_t k)
    {
        std::vector<std::size_t> j;
        for (std::size_t i = 1; i <= k; ++i)
            if (uniform() < 0.5)
                j.push_back(i);
        return j;
    }

    std::vector<double> probs(std::size_t q)
    {
        std::vector<double> p(q);
        double total = 0.0;
        for (auto& v : p)
            total += v = 0.05 + uniform();
        for (auto& v : p)
            v /= total;
        return p;
    }

private:
    StreamCursor cur_;
};

} // namespace rdsync::testing
