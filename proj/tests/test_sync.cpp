#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "rdsync/engine.hpp"
#include "rdsync/sync.hpp"

using namespace rdsync;

namespace {

double pow3(std::size_t n)
{
    return std::pow(3.0, -static_cast<double>(n));
}

} // namespace

TEST(DiameterSeries, CantorIsDeterministic)
{
    const auto fam = families::cantor1d();
    const auto s = diameter_series(fam, probe_cloud(fam.probe()), 20, 30, 1);
    ASSERT_EQ(s.replicas(), 30u);
    for (const auto& d : s.diam)
        for (std::size_t n = 0; n <= 20; ++n)
            EXPECT_NEAR(d[n], pow3(n), 1e-12);
    EXPECT_TRUE(s.bounded);
    EXPECT_FALSE(s.saturated);
}

TEST(DiameterSeries, Cantor2dIsTwiceCantor)
{
    const auto fam = families::cantor2d();
    const auto s = diameter_series(fam, probe_cloud(fam.probe()), 20, 30, 2);
    for (const auto& d : s.diam)
        for (std::size_t n = 0; n <= 20; ++n)
            EXPECT_NEAR(d[n], 2 * pow3(n), 1e-12);
}

TEST(DiameterSeries, ConstantFamilyCollapses)
{
    const auto fam = families::constant({{0.2}, {0.7}});
    const auto s = diameter_series(fam, probe_cloud(fam.probe()), 10, 20, 3);
    for (const auto& d : s.diam)
        for (std::size_t n = 1; n <= 10; ++n)
            EXPECT_EQ(d[n], 0.0);
    const auto fit = fit_rate(s);
    EXPECT_TRUE(fit.degenerate);
    EXPECT_EQ(fit.r_hat, 0.0);
}

TEST(DiameterSeries, ExpPairIsNotBounded)
{
    const auto fam = families::exp1d();
    const auto s = diameter_series(fam, probe_cloud(fam.probe()), 25, 200, 4);
    EXPECT_FALSE(s.bounded);
    EXPECT_TRUE(s.saturated);
}

TEST(DiameterSeriesProperty, ReverseDiametersAreNonIncreasing)
{
    for (const auto& fam : {families::cantor1d({0.2, 0.8}), families::cantor2d(), families::lip_pair({0.5, 0.5}, true),
                            families::noisy_contraction(0.5, -1.0, 1.0)}) {
        const auto s = diameter_series(fam, probe_cloud(fam.probe()), 25, 50, 5);
        for (const auto& d : s.diam)
            for (std::size_t n = 1; n < d.size(); ++n) {
                EXPECT_GE(d[n], 0.0);
                EXPECT_LE(d[n], d[n - 1] + 1e-12) << fam.name() << " n=" << n;
            }
    }
}

TEST(DiameterSeries, ThreadCountDoesNotChangeResults)
{
    const auto fam = families::lip_pair({0.5, 0.5}, true);
    const auto a = diameter_series(fam, probe_cloud(fam.probe()), 20, 64, 7, 1);
    const auto b = diameter_series(fam, probe_cloud(fam.probe()), 20, 64, 7, 5);
    EXPECT_EQ(a.diam, b.diam);
    EXPECT_EQ(a.m0, b.m0);
}

TEST(FitRate, CantorRatio)
{
    const auto fam = families::cantor1d();
    const auto s = diameter_series(fam, probe_cloud(fam.probe()), 25, 50, 1);
    const auto fit = fit_rate(s, 100, 1);
    EXPECT_GE(fit.r_hat, 0.32);
    EXPECT_LE(fit.r_hat, 0.35);
    EXPECT_LE(fit.ci_lo, fit.r_hat);
    EXPECT_GE(fit.ci_hi, fit.r_hat);
    EXPECT_GE(fit.r_squared, 0.99);
    EXPECT_FALSE(fit.warning);
    EXPECT_GE(fit.n_first, std::max<std::size_t>(s.m0, 1));
}

TEST(FitRate, LipschitzPairWithAndWithoutSplitting)
{
    const auto plain = families::lip_pair({0.5, 0.5});
    const auto s1 = diameter_series(plain, probe_cloud(plain.probe()), 30, 400, 2);
    const auto f1 = fit_rate(s1, 50, 2);
    // Slopes 2 and 1/2 with equal weights: E[slope] = 5/4, the mean diameter grows.
    EXPECT_GE(f1.r_hat, 1.0);
    EXPECT_TRUE(f1.warning);

    const auto disjoint = families::lip_pair({0.5, 0.5}, true);
    const auto s2 = diameter_series(disjoint, probe_cloud(disjoint.probe()), 30, 400, 2);
    const auto f2 = fit_rate(s2, 50, 2);
    EXPECT_LT(f2.r_hat, 1.0);
    EXPECT_FALSE(f2.warning);
}

TEST(FitRateProperty, MeanDiameterUnderFittedBound)
{
    for (const auto& fam : {families::cantor1d(), families::cantor2d({0.3, 0.7}), families::lip_pair({0.5, 0.5}, true)}) {
        const auto s = diameter_series(fam, probe_cloud(fam.probe()), 20, 200, 9);
        const auto fit = fit_rate(s, 0);
        ASSERT_GE(fit.r_squared, 0.9) << fam.name();
        const auto mean = s.mean();
        EXPECT_GE(fit.c_bound, fit.c_hat);
        // A good log-linear fit keeps the envelope close to the regression line.
        EXPECT_LE(fit.c_bound, 10.0 * fit.c_hat) << fam.name();
        for (std::size_t n = fit.n_first; n <= fit.n_last; ++n)
            EXPECT_LE(mean[n], static_cast<double>(fam.dim()) * fit.c_bound * std::pow(fit.r_hat, static_cast<double>(n)) *
                                   (1 + 1e-12))
                << fam.name() << " n=" << n;
    }
}

TEST(FitLogLinear, DropsValuesBelowFloor)
{
    std::vector<double> steps, values;
    for (int n = 0; n < 10; ++n) {
        steps.push_back(n);
        values.push_back(n < 7 ? std::pow(0.5, n) : 1e-300);
    }
    const auto fit = fit_log_linear(steps, values, 1e-12);
    EXPECT_NEAR(fit.r_hat, 0.5, 1e-12);
    EXPECT_EQ(fit.n_last, 6u);
    const auto degenerate = fit_log_linear(steps, values, 0.1);
    EXPECT_TRUE(degenerate.degenerate);
}

TEST(DiamCsv, Layout)
{
    const auto fam = families::cantor1d();
    const auto s = diameter_series(fam, probe_cloud(fam.probe()), 5, 10, 42);
    std::ostringstream os;
    write_diam_csv(os, s, fit_rate(s, 0));
    EXPECT_EQ(os.str().rfind("# seed=42", 0), 0u);
    EXPECT_NE(os.str().find("n,mean_diam,q05,q95,bound_c_rn\n"), std::string::npos);
}

TEST(ForwardGap, CantorBound)
{
    const auto fam = families::cantor1d();
    const auto probe = probe_cloud(fam.probe());
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto g = forward_attractor_gap(fam, seed, Point{0.0}, 15, 1e-12, probe);
        ASSERT_EQ(g.gap.size(), 15u);
        for (std::size_t i = 0; i < g.n.size(); ++i) {
            EXPECT_EQ(g.n[i], i + 1);
            EXPECT_LE(g.gap[i], pow3(g.n[i]) + 1e-12);
            EXPECT_LE(g.gap[i], g.image_diam[i] + 1e-12);
        }
    }
}

TEST(ForwardGap, Cantor2dAndConstant)
{
    const auto c2 = families::cantor2d();
    const auto g2 = forward_attractor_gap(c2, 3, Point{1.0, -1.0}, 12, 1e-12, probe_cloud(c2.probe()));
    for (std::size_t i = 0; i < g2.n.size(); ++i)
        EXPECT_LE(g2.gap[i], 2 * pow3(g2.n[i]) + 1e-12);

    const auto cst = families::constant({{0.3}, {0.6}});
    const auto g0 = forward_attractor_gap(cst, 3, Point{0.9}, 5, 1e-12, probe_cloud(cst.probe()));
    for (double g : g0.gap)
        EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(ForwardGap, InnerPullbackFailureIsNotConverged)
{
    const auto plain = families::lip_pair({0.5, 0.5});
    EXPECT_THROW(forward_attractor_gap(plain, 1, Point{0.5}, 3, 1e-12, probe_cloud(plain.probe()), 20), NotConverged);
}
