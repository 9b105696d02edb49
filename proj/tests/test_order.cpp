#include <gtest/gtest.h>

#include "rdsync/order.hpp"
#include "support.hpp"

using namespace rdsync;
using rdsync::testing::Gen;

namespace {

// Box order decided by enumerating every corner pair.
SetOrder corner_oracle(const Box& b1, const Box& b2, const JOrder& ord)
{
    const auto c1 = b1.corners(), c2 = b2.corners();
    const std::size_t k = b1.dim();
    bool all_less = true, all_greater = true;
    for (std::size_t i = 0; i < c1.size(); i += k)
        for (std::size_t j = 0; j < c2.size(); j += k) {
            const auto o = cmp_points({c1.data() + i, k}, {c2.data() + j, k}, ord);
            all_less &= o == PointOrder::Less;
            all_greater &= o == PointOrder::Greater;
        }
    return all_less ? SetOrder::Less : all_greater ? SetOrder::Greater : SetOrder::Inconclusive;
}

} // namespace

TEST(CmpPoints, Examples)
{
    const JOrder j1(2, {1});
    EXPECT_EQ(cmp_points(Point{0, 1}, Point{1, 0}, j1), PointOrder::Less);
    EXPECT_EQ(cmp_points(Point{0, 0}, Point{1, 1}, j1), PointOrder::Incomparable);
    EXPECT_EQ(cmp_points(Point{0.3}, Point{0.7}, JOrder(1, {1})), PointOrder::Less);
}

TEST(CmpPoints, ToleranceBand)
{
    const JOrder ord(1, {1});
    EXPECT_EQ(cmp_points(Point{0.0}, Point{5e-13}, ord), PointOrder::Equal);
    EXPECT_EQ(cmp_points(Point{0.0}, Point{2e-12}, ord), PointOrder::Less);
    EXPECT_EQ(cmp_points(Point{0.0, 0.0}, Point{1.0, 5e-13}, JOrder(2, {1, 2})), PointOrder::Incomparable);
}

TEST(CmpPoints, DimensionMismatch)
{
    EXPECT_THROW(cmp_points(Point{0.0}, Point{0.0, 1.0}, JOrder(1, {1})), UsageError);
    EXPECT_THROW(JOrder(2, {3}), UsageError);
    EXPECT_THROW(JOrder(0, {}), UsageError);
}

TEST(CmpPoints, EmptyJReversesEverything)
{
    const JOrder ord(2, {});
    EXPECT_EQ(cmp_points(Point{1, 1}, Point{0, 0}, ord), PointOrder::Less);
}

TEST(CmpPointsProperty, AntisymmetryAndTransitivity)
{
    Gen g(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t k = 1 + g.index(4);
        const JOrder ord(k, g.subset(k));
        const Point x = g.point(k), y = g.point(k), z = g.point(k);
        const auto xy = cmp_points(x, y, ord);
        const auto yx = cmp_points(y, x, ord);
        EXPECT_EQ(xy == PointOrder::Less, yx == PointOrder::Greater);
        EXPECT_EQ(xy == PointOrder::Equal, yx == PointOrder::Equal);
        if (xy == PointOrder::Less && cmp_points(y, z, ord) == PointOrder::Less)
            EXPECT_EQ(cmp_points(x, z, ord), PointOrder::Less);
    }
}

TEST(CmpBoxes, Examples)
{
    const JOrder ord1(1, {1});
    EXPECT_EQ(cmp_boxes(Box({0}, {1.0 / 3}), Box({2.0 / 3}, {1}), ord1), SetOrder::Less);
    EXPECT_EQ(cmp_boxes(Box({2.0 / 3}, {1}), Box({0}, {1.0 / 3}), ord1), SetOrder::Greater);
    EXPECT_EQ(cmp_boxes(Box({0}, {0.5}), Box({0.4}, {1}), ord1), SetOrder::Inconclusive);
    const JOrder ord2(2, {1});
    const Box a({0, 0}, {1.0 / 3, 1.0 / 3});
    const Box b({2.0 / 3, -2.0 / 3}, {1, -1.0 / 3});
    EXPECT_EQ(cmp_boxes(a, b, ord2), SetOrder::Less);
    EXPECT_EQ(corner_oracle(a, b, ord2), SetOrder::Less);
}

TEST(CmpBoxesProperty, MatchesCornerEnumeration)
{
    Gen g(12);
    int less = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t k = 1 + g.index(3);
        const JOrder ord(k, g.subset(k));
        // Small boxes so that ordered pairs turn up often.
        Box b1 = g.box(k, -1, 1), b2 = g.box(k, -1, 1);
        for (std::size_t i = 0; i < k; ++i) {
            b1.hi[i] = b1.lo[i] + 0.1 * (b1.hi[i] - b1.lo[i]);
            b2.hi[i] = b2.lo[i] + 0.1 * (b2.hi[i] - b2.lo[i]);
        }
        const auto got = cmp_boxes(b1, b2, ord);
        EXPECT_EQ(got, corner_oracle(b1, b2, ord));
        if (got == SetOrder::Less) {
            ++less;
            EXPECT_TRUE(projections_disjoint(b1, b2));
            for (int s = 0; s < 100; ++s) {
                Point p(k), q(k);
                for (std::size_t i = 0; i < k; ++i) {
                    p[i] = g.uniform(b1.lo[i], b1.hi[i]);
                    q[i] = g.uniform(b2.lo[i], b2.hi[i]);
                }
                ASSERT_EQ(cmp_points(p, q, ord), PointOrder::Less);
            }
        }
    }
    EXPECT_GT(less, 50);
}

TEST(ProjectionsDisjoint, Examples)
{
    EXPECT_TRUE(projections_disjoint(Box({0}, {1.0 / 3}), Box({2.0 / 3}, {1})));
    EXPECT_FALSE(projections_disjoint(Box({0, 0}, {1, 1}), Box({2, 0}, {3, 1})));
    const Box b({-1, 2}, {0, 3});
    EXPECT_FALSE(projections_disjoint(b, b));
}

TEST(BoxTest, DiameterIsTaxicab)
{
    const Box b({0, -1, 2}, {0.5, 1, 2});
    EXPECT_DOUBLE_EQ(b.diameter(), 2.5);
    const std::vector<double> flat{0, 0, 1, -1, 0.5, 3};
    const Box h = Box::hull(flat, 2);
    EXPECT_EQ(h.lo, (Point{0, -1}));
    EXPECT_EQ(h.hi, (Point{1, 3}));
    EXPECT_EQ(b.corners().size(), 8u * 3u);
}

TEST(BoxTest, RejectsInvertedBounds)
{
    EXPECT_THROW(Box({1}, {0}), UsageError);
}
