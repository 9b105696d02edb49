#include <algorithm>
#include <cmath>
#include <set>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "rdsync/parallel.hpp"
#include "rdsync/random.hpp"
#include "rdsync/stats.hpp"

using namespace rdsync;

TEST(CounterStream, DrawsAreAddressable)
{
    const CounterStream s(42, 7);
    StreamCursor cur(42, 7);
    for (std::uint64_t j = 0; j < 100; ++j)
        EXPECT_EQ(cur.uniform(), s.uniform(j));
    EXPECT_EQ(CounterStream(42, 7).uniform(1000000), s.uniform(1000000));
}

TEST(CounterStream, StreamsAndSeedsDiffer)
{
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        for (std::uint64_t id = 0; id < 20; ++id)
            firsts.insert(CounterStream(seed, id).bits(0));
    EXPECT_EQ(firsts.size(), 400u);
    EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
    EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
    EXPECT_NE(derive_seed(1, "a"), derive_seed(2, "a"));
}

TEST(CounterStream, UniformMoments)
{
    const CounterStream s(3, 0);
    std::vector<double> u(200000);
    for (std::size_t j = 0; j < u.size(); ++j) {
        u[j] = s.uniform(j);
        ASSERT_GE(u[j], 0.0);
        ASSERT_LT(u[j], 1.0);
    }
    EXPECT_NEAR(stats::mean(u), 0.5, 0.003);
    EXPECT_NEAR(stats::variance(u), 1.0 / 12.0, 0.002);
    // Lag-1 correlation of consecutive counters.
    std::vector<double> a(u.begin(), u.end() - 1), b(u.begin() + 1, u.end());
    EXPECT_NEAR(stats::correlation(a, b), 0.0, 0.01);
}

TEST(StreamCursor, BelowIsUniformOverResidues)
{
    StreamCursor cur(5, 1);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i)
        ++counts[cur.below(7)];
    for (int c : counts)
        EXPECT_NEAR(c, 10000, 400);
}

TEST(StreamCursor, NormalMoments)
{
    StreamCursor cur(6, 2);
    std::vector<double> z(100000);
    for (auto& v : z)
        v = cur.normal();
    EXPECT_NEAR(stats::mean(z), 0.0, 0.015);
    EXPECT_NEAR(stats::variance(z), 1.0, 0.02);
    EXPECT_GT(stats::ks_test_normal(z).p_value, 0.001);
}

TEST(ParallelFor, ResultsIndependentOfThreadCount)
{
    auto run = [](unsigned threads) {
        std::vector<double> out(1001);
        parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = CounterStream(9, i).uniform(0); });
        return out;
    };
    const auto one = run(1);
    EXPECT_EQ(one, run(3));
    EXPECT_EQ(one, run(8));
    EXPECT_EQ(one, run(2000));
}

TEST(ParallelFor, PropagatesExceptions)
{
    EXPECT_THROW(parallel_for(100, 4,
                              [](std::size_t i) {
                                  if (i == 77)
                                      throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
    EXPECT_NO_THROW(parallel_for(0, 4, [](std::size_t) { FAIL(); }));
}
