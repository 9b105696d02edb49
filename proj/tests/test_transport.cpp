#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "rdsync/engine.hpp"
#include "rdsync/transport.hpp"
#include "support.hpp"

using namespace rdsync;
using rdsync::testing::Gen;

namespace {

// Optimal uniform transport cost by trying all N! pairings.
double brute_force_w1(const EmpiricalMeasure& a, const EmpiricalMeasure& b)
{
    std::vector<std::size_t> perm(a.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = INFINITY;
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < perm.size(); ++i)
            cost += l1_distance(a.point(i), b.point(perm[i]));
        best = std::min(best, cost / static_cast<double>(perm.size()));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

EmpiricalMeasure random_cloud(Gen& g, std::size_t k, std::size_t n)
{
    std::vector<double> pts(n * k);
    for (auto& v : pts)
        v = g.uniform(-1, 1);
    return EmpiricalMeasure::uniform(k, std::move(pts));
}

} // namespace

TEST(Wasserstein, Examples)
{
    const auto a = EmpiricalMeasure::uniform(1, {0, 0.5, 1});
    const auto b = EmpiricalMeasure::uniform(1, {0.1, 0.6, 1.1});
    EXPECT_EQ(wasserstein1(a, a).distance, 0.0);
    EXPECT_DOUBLE_EQ(wasserstein1(EmpiricalMeasure::dirac(Point{0}), EmpiricalMeasure::dirac(Point{1})).distance, 1.0);
    EXPECT_NEAR(wasserstein1(a, b).distance, 0.1, 1e-15);
    EXPECT_NEAR(brute_force_w1(a, b), 0.1, 1e-15);
}

TEST(Wasserstein, MethodSelection)
{
    Gen g(1);
    EXPECT_EQ(wasserstein1(random_cloud(g, 1, 2000), random_cloud(g, 1, 2000)).method, TransportReport::Method::Sorted1D);
    EXPECT_EQ(wasserstein1(random_cloud(g, 2, 512), random_cloud(g, 2, 512)).method,
              TransportReport::Method::ExactMatching);
    const auto sliced = wasserstein1(random_cloud(g, 2, 513), random_cloud(g, 2, 513));
    EXPECT_EQ(sliced.method, TransportReport::Method::Sliced);
    EXPECT_EQ(sliced.n_projections, 128u);
    EXPECT_EQ(to_string(TransportReport::Method::ExactMatching), "ExactMatching");
}

TEST(Wasserstein, SizeMismatchForMatching)
{
    Gen g(2);
    EXPECT_THROW(w1_exact_matching(random_cloud(g, 2, 5), random_cloud(g, 2, 6)), UsageError);
    EXPECT_THROW(wasserstein1(random_cloud(g, 1, 5), random_cloud(g, 2, 5)), UsageError);
}

TEST(WassersteinProperty, SortedMatchesBruteForce)
{
    Gen g(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + g.index(8);
        const auto a = random_cloud(g, 1, n), b = random_cloud(g, 1, n);
        const double oracle = brute_force_w1(a, b);
        EXPECT_NEAR(w1_sorted_1d(a, b), oracle, 1e-12);
        EXPECT_NEAR(w1_exact_matching(a, b), oracle, 1e-12);
    }
}

TEST(WassersteinProperty, MatchingMatchesBruteForceInThePlane)
{
    Gen g(4);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t k = 2 + g.index(2), n = 1 + g.index(7);
        const auto a = random_cloud(g, k, n), b = random_cloud(g, k, n);
        const double exact = w1_exact_matching(a, b);
        EXPECT_NEAR(exact, brute_force_w1(a, b), 1e-12);
        // Sup-norm-normalized directions give a lower bound of the taxicab W1.
        EXPECT_LE(w1_sliced(a, b, 64, trial), exact + 1e-12);
    }
}

TEST(WassersteinProperty, WeightedSortedEqualsReplicatedUniform)
{
    Gen g(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + g.index(5);
        EmpiricalMeasure w;
        w.k = 1;
        std::vector<double> rep;
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = g.uniform(-1, 1);
            const std::size_t c = 1 + g.index(3);
            w.points.push_back(x);
            w.weights.push_back(static_cast<double>(c));
            total += c;
            rep.insert(rep.end(), c, x);
        }
        for (auto& v : w.weights)
            v /= static_cast<double>(total);
        const auto other = random_cloud(g, 1, total);
        EXPECT_NEAR(w1_sorted_1d(w, other), w1_sorted_1d(EmpiricalMeasure::uniform(1, rep), other), 1e-12);
    }
}

TEST(WassersteinProperty, MetricAxioms)
{
    Gen g(6);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t k = trial % 2 == 0 ? 1 : 2;
        const std::size_t n = 1 + g.index(10);
        const auto a = random_cloud(g, k, n), b = random_cloud(g, k, n), c = random_cloud(g, k, n);
        const double ab = wasserstein1(a, b).distance, ba = wasserstein1(b, a).distance;
        const double bc = wasserstein1(b, c).distance, ac = wasserstein1(a, c).distance;
        EXPECT_EQ(ab, ba);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ac, ab + bc + 1e-9);
        EXPECT_EQ(wasserstein1(a, a).distance, 0.0);
    }
}

TEST(Assignment, MatchesBruteForce)
{
    Gen g(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + g.index(6);
        std::vector<double> cost(n * n);
        for (auto& c : cost)
            c = std::floor(g.uniform(0, 10)); // ties on purpose
        const auto assign = min_cost_assignment(cost, n);
        std::vector<std::size_t> seen = assign;
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 0; i < n; ++i)
            ASSERT_EQ(seen[i], i);
        double got = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            got += cost[i * n + assign[i]];
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        double best = INFINITY;
        do {
            double c = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                c += cost[i * n + perm[i]];
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        EXPECT_DOUBLE_EQ(got, best);
    }
}

TEST(PullbackSample, CantorMoments)
{
    const auto fam = families::cantor1d();
    const auto mu = pullback_sample(fam, 1, 20000, 1e-9, 400, probe_cloud(fam.probe()), 2);
    EXPECT_EQ(mu.size(), 20000u);
    EXPECT_EQ(mu.provenance, EmpiricalMeasure::Provenance::Pullback);
    EXPECT_NEAR(mu.mean()[0], 0.5, 0.01);
    EXPECT_NEAR(mu.variance()[0], 0.125, 0.005);
    EXPECT_EQ(mu.failures, 0u);
}

TEST(PullbackSample, Cantor2dMean)
{
    const auto fam = families::cantor2d();
    const auto mu = pullback_sample(fam, 2, 20000, 1e-9, 400, probe_cloud(fam.probe()));
    EXPECT_NEAR(mu.mean()[0], 0.5, 0.01);
    EXPECT_NEAR(mu.mean()[1], -0.5, 0.01);
}

TEST(PullbackSample, ExpPairNegativeFraction)
{
    const auto fam = families::exp1d({0.3, 0.7});
    const auto mu = pullback_sample(fam, 3, 4000, 1e-9, 400, probe_cloud(fam.probe()));
    const double neg = static_cast<double>(std::count_if(mu.points.begin(), mu.points.end(), [](double x) { return x < 0; }));
    EXPECT_NEAR(neg / 4000.0, 0.7, 3 * std::sqrt(0.21 / 4000.0));
}

TEST(PullbackSample, TooManyFailuresIsDiagnostic)
{
    const auto fam = families::cantor1d();
    EXPECT_THROW(pullback_sample(fam, 1, 100, 1e-9, 5, probe_cloud(fam.probe())), DiagnosticError);
}

TEST(PullbackSample, ThreadCountDoesNotChangeResults)
{
    const auto fam = families::cantor2d();
    const auto probe = probe_cloud(fam.probe());
    EXPECT_EQ(pullback_sample(fam, 4, 500, 1e-9, 400, probe, 1).points,
              pullback_sample(fam, 4, 500, 1e-9, 400, probe, 7).points);
}

TEST(PushForward, Examples)
{
    const auto fam = families::cantor1d({0.3, 0.7});
    Gen g(8);
    const auto mu = random_cloud(g, 1, 50);
    EXPECT_EQ(push_forward(fam, mu, 0, 1).points, mu.points);

    std::vector<double> zeros(20000, 0.0);
    const auto pushed = push_forward(fam, EmpiricalMeasure::uniform(1, zeros), 1, 2);
    std::size_t at_zero = 0, at_two_thirds = 0;
    for (double x : pushed.points) {
        at_zero += x == 0.0;
        at_two_thirds += x == 2.0 / 3.0;
    }
    EXPECT_EQ(at_zero + at_two_thirds, 20000u);
    EXPECT_NEAR(static_cast<double>(at_zero) / 20000.0, 0.3, 3 * std::sqrt(0.21 / 20000.0));
    EXPECT_EQ(pushed.weights, EmpiricalMeasure::uniform(1, zeros).weights);

    const auto cst = families::constant({{0.25, 0.5}});
    const auto c = push_forward(cst, random_cloud(g, 2, 10), 1, 3);
    for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_EQ(c.point(i)[0], 0.25);
}

TEST(Stationarity, PushForwardIsWithinNoiseFloor)
{
    const auto fam = families::cantor1d();
    const auto mu = pullback_sample(fam, 10, 4096, 1e-9, 400, probe_cloud(fam.probe()));
    const double floor = pullback_noise_floor(fam, 11, 4096, 1e-9, 400);
    const double moved = wasserstein1(push_forward(fam, mu, 1, 12), mu).distance;
    EXPECT_LE(moved, 2 * floor);
}

TEST(Duality, ForwardLawMatchesReverseLawWithinFloor)
{
    const auto fam = families::cantor2d({0.4, 0.6});
    const std::size_t R = 2000, n = 8;
    const Point x0{0.0, 0.0};
    std::vector<double> pts;
    for (std::size_t i = 0; i < R; ++i)
        pts.insert(pts.end(), x0.begin(), x0.end());
    const auto fwd = push_forward(fam, EmpiricalMeasure::uniform(2, pts), n, 1);
    const auto fwd2 = push_forward(fam, EmpiricalMeasure::uniform(2, pts), n, 2);
    std::vector<double> rev;
    for (std::size_t r = 0; r < R; ++r) {
        const auto t = reverse_orbit(fam, sample_block(fam.noise(), 3, r, n), x0);
        rev.insert(rev.end(), t.positions.back().begin(), t.positions.back().end());
    }
    const auto rv = EmpiricalMeasure::uniform(2, rev);
    const double floor = wasserstein1(fwd, fwd2, 5).distance;
    EXPECT_LE(wasserstein1(fwd, rv, 5).distance, 2 * floor + 1e-12);
}

TEST(DecayCurve, CantorFromDiracZero)
{
    const auto fam = families::cantor1d();
    const auto curve = w1_decay_curve(fam, EmpiricalMeasure::dirac(Point{0}), 12, 4096, 1);
    ASSERT_EQ(curve.w1.size(), 13u);
    EXPECT_GE(curve.fit.r_hat, 0.30);
    EXPECT_LE(curve.fit.r_hat, 0.37);
    EXPECT_GE(curve.fit.r_squared, 0.9);
    EXPECT_TRUE(curve.bounded);
    EXPECT_TRUE(curve.coupled);
    EXPECT_EQ(curve.method, TransportReport::Method::Sorted1D);
}

TEST(DecayCurve, UncoupledReferenceHitsTheFloor)
{
    const auto fam = families::cantor1d();
    const auto curve = w1_decay_curve(fam, EmpiricalMeasure::dirac(Point{0}), 10, 1024, 2, 1e-9, 1024, false);
    const double floor = pullback_noise_floor(fam, 3, 1024, 1e-9, 400);
    EXPECT_LT(curve.w1.back(), 3 * floor);
    EXPECT_GT(curve.w1.front(), 0.4);
}

TEST(DecayCurve, StationaryStartStaysAtTheFloor)
{
    // Started at a pullback sample, w1[0] is a single two-sample distance, so
    // the comparison with the (averaged) floor is made on the mean over starts.
    const auto fam = families::cantor1d();
    const double floor = pullback_noise_floor(fam, 21, 2048, 1e-9, 400);
    const std::size_t starts = 6;
    std::vector<double> mean(7, 0.0);
    for (std::uint64_t s = 0; s < starts; ++s) {
        const auto mu = pullback_sample(fam, 200 + s, 2048, 1e-9, 400, probe_cloud(fam.probe()));
        const auto curve = w1_decay_curve(fam, mu, 6, 2048, 300 + s, 1e-9, 2048);
        ASSERT_EQ(curve.w1.size(), mean.size());
        for (std::size_t n = 0; n < mean.size(); ++n)
            mean[n] += curve.w1[n] / starts;
    }
    for (std::size_t n = 0; n < mean.size(); ++n)
        EXPECT_LE(mean[n], 2 * floor) << "n=" << n;
}

TEST(DecayCurve, ConstantFamilyIsZeroAfterOneStep)
{
    const auto fam = families::constant({{0.1, 0.2}, {0.3, 0.4}});
    const auto curve = w1_decay_curve(fam, EmpiricalMeasure::dirac(Point{1, 1}), 4, 256, 3, 1e-9, 256);
    for (std::size_t n = 1; n < curve.w1.size(); ++n)
        EXPECT_EQ(curve.w1[n], 0.0);
}

TEST(DecayCurve, UnboundedFamilyWarns)
{
    const auto fam = families::exp1d();
    const auto curve = w1_decay_curve(fam, EmpiricalMeasure::dirac(Point{0}), 3, 256, 3, 1e-9, 256);
    EXPECT_FALSE(curve.bounded);
}

TEST(MeasureCsv, RoundTrip)
{
    Gen g(9);
    auto mu = random_cloud(g, 3, 17);
    mu.weights[0] += 0.5;
    for (auto& w : mu.weights)
        w /= 1.5;
    std::stringstream ss;
    write_measure_csv(ss, mu, 77);
    EXPECT_EQ(ss.str().rfind("# seed=77", 0), 0u);
    const auto back = read_measure_csv(ss);
    EXPECT_EQ(back.k, 3u);
    EXPECT_EQ(back.points, mu.points);
    EXPECT_EQ(back.weights, mu.weights);
}

TEST(MeasureCsv, RejectsBadInput)
{
    std::stringstream bad("x_1,weight\n0.5,0.7\n");
    EXPECT_THROW(read_measure_csv(bad), UsageError);
    std::stringstream ragged("x_1,x_2,weight\n0.5,1\n");
    EXPECT_THROW(read_measure_csv(ragged), UsageError);
}
