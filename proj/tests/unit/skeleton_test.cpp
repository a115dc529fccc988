#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "qca/error.hpp"
#include "qca/skeleton.hpp"

using qca::Centerline;
using qca::Mask;
using qca::Point;
using qca::Skeleton;

namespace {

Skeleton skeleton_of(const Mask& m) { return Skeleton::from_mask(m); }

Mask horizontal_line(int length, int width = 0, int height = 5)
{
    Mask m(width ? width : length + 4, height);
    oracle::fill_rect(m, 2, height / 2, length, 1);
    return m;
}

// Three 10-point arms meeting at a centre pixel (the centre is shared).
Mask perfect_t()
{
    Mask m(30, 20);
    oracle::fill_rect(m, 4, 5, 19, 1);  // horizontal bar through the centre (13, 5)
    oracle::fill_rect(m, 13, 6, 1, 9);  // stem
    return m;
}

}  // namespace

TEST(Thin, ThinLineIsUnchanged)
{
    const Mask m = horizontal_line(10);
    EXPECT_EQ(qca::thin(m).as_mask(), m);
}

TEST(Thin, BarBecomesHorizontalLine)
{
    Mask m(15, 7);
    oracle::fill_rect(m, 2, 2, 11, 3);
    const Skeleton s = qca::thin(m);
    ASSERT_FALSE(s.empty());
    for (auto p : s.points) {
        EXPECT_EQ(p.y, 3);
    }
    EXPECT_EQ(oracle::component_count(s.as_mask()), 1);
    EXPECT_EQ(s.as_mask(), oracle::zhang_suen(m));
}

TEST(Thin, DiskCollapsesToFewPoints)
{
    Mask m(21, 21);
    oracle::fill_disk(m, 10, 10, 7);
    const Skeleton s = qca::thin(m);
    EXPECT_LT(s.size(), 16u);
    EXPECT_EQ(s.as_mask(), oracle::zhang_suen(m));
}

TEST(Thin, EmptyMaskIsEmptyInputError)
{
    try {
        qca::thin(Mask(5, 5));
        FAIL();
    } catch (const qca::Error& e) {
        EXPECT_EQ(e.code(), qca::ErrorCode::empty_input);
    }
}

TEST(Thin, SkeletonIsSubsetOfMask)
{
    qca::Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const Mask m = oracle::random_blob(rng, 32, 32);
        for (auto p : qca::thin(m).points) {
            EXPECT_TRUE(m.test(p));
        }
    }
}

TEST(Thin, IdempotentAndTopologyPreservingOnRandomBlobs)
{
    qca::Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const Mask m = oracle::random_blob(rng, 32, 28);
        const Skeleton once = qca::thin(m);
        const Skeleton twice = qca::thin(once.as_mask());
        EXPECT_EQ(once.points, twice.points) << "trial " << trial;
        EXPECT_EQ(oracle::component_count(once.as_mask()), oracle::component_count(m)) << "trial " << trial;
    }
}

TEST(Thin, TwoByTwoBlockKeepsOnePoint)
{
    Mask m(6, 6);
    oracle::fill_rect(m, 2, 2, 2, 2);
    EXPECT_EQ(qca::thin(m).size(), 1u);
}

TEST(ClassifyPoints, LineHasTwoEndpoints)
{
    const auto c = qca::classify_points(skeleton_of(horizontal_line(10)));
    EXPECT_EQ(c.endpoints.size(), 2u);
    EXPECT_TRUE(c.bifurcations.empty());
}

TEST(ClassifyPoints, PerfectTHasThreeEndpointsOneJunction)
{
    const auto c = qca::classify_points(skeleton_of(perfect_t()));
    EXPECT_EQ(c.endpoints.size(), 3u);
    ASSERT_EQ(c.bifurcations.size(), 1u);
    EXPECT_EQ(c.bifurcations[0], (Point{13, 5}));
}

TEST(ClassifyPoints, IsolatedPointIsEndpoint)
{
    Mask m(3, 3);
    m.set(1, 1);
    const auto c = qca::classify_points(skeleton_of(m));
    EXPECT_EQ(c.endpoints, (std::vector<Point>{{1, 1}}));
    EXPECT_TRUE(c.bifurcations.empty());
}

TEST(ClassifyPoints, StaircaseIsNotJunction)
{
    Mask m(12, 12);
    for (int i = 0; i < 8; ++i) {
        m.set(i + 1, i + 1);
        m.set(i + 2, i + 1);
    }
    const auto c = qca::classify_points(skeleton_of(m));
    EXPECT_TRUE(c.bifurcations.empty());
    EXPECT_EQ(c.endpoints.size(), 2u);
}

TEST(Prune, ShortSpurOffMiddleIsRemoved)
{
    Mask m(60, 20);
    oracle::fill_rect(m, 5, 10, 50, 1);
    oracle::fill_rect(m, 30, 11, 1, 5);  // 5-point spur below (30, 10)
    const Skeleton pruned = qca::prune(skeleton_of(m), {25, qca::PruneMode::spur});
    Mask expected(60, 20);
    oracle::fill_rect(expected, 5, 10, 50, 1);
    EXPECT_EQ(pruned.as_mask(), expected);
}

TEST(Prune, LongArmedTIsUnchanged)
{
    Mask m(100, 60);
    oracle::fill_rect(m, 5, 5, 81, 1);   // arms of 40 either side of (45, 5)
    oracle::fill_rect(m, 45, 6, 1, 40);  // stem of 40
    const Skeleton s = skeleton_of(m);
    EXPECT_EQ(qca::remove_spurs(s, 25).points, s.points);
}

TEST(Prune, NoBifurcationIsUnchanged)
{
    Mask m(40, 40);
    oracle::draw_line(m, 2, 2, 30, 20);
    const Skeleton s = skeleton_of(m);
    EXPECT_EQ(qca::prune(s).points, s.points);
}

TEST(Prune, ShortArmedTFallsBackToLongestPath)
{
    const Skeleton pruned = qca::prune(skeleton_of(perfect_t()), {25, qca::PruneMode::spur});
    EXPECT_TRUE(qca::is_simple_path(pruned));
}

TEST(Prune, RandomTreesBecomeSinglePath)
{
    qca::Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const auto tree = oracle::random_tree(rng, 25);
        const Skeleton pruned = qca::prune(skeleton_of(tree.mask), {25, qca::PruneMode::spur});
        ASSERT_TRUE(qca::is_simple_path(pruned)) << "trial " << trial;
        EXPECT_GE(static_cast<int>(pruned.size()), tree.trunk_length);
    }
}

TEST(Prune, RemainingSpursAreLongEnoughWithoutFallback)
{
    qca::Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto tree = oracle::random_tree(rng, 25);
        const Skeleton s = qca::remove_spurs(skeleton_of(tree.mask), 25);
        const Mask sm = s.as_mask();
        const auto classes = qca::classify_points(s);
        if (classes.bifurcations.empty()) {
            continue;
        }
        const std::set<Point> junctions(classes.bifurcations.begin(), classes.bifurcations.end());
        for (auto end : classes.endpoints) {
            // Walk to the first junction and count the branch.
            int length = 1;
            Point prev{-1, -1};
            Point cur = end;
            while (!junctions.contains(cur)) {
                const auto next = qca::skeleton_neighbors(sm, cur);
                Point step{-1, -1};
                for (auto q : next) {
                    if (!(q == prev)) {
                        step = q;
                    }
                }
                if (step.x < 0) {
                    break;
                }
                prev = cur;
                cur = step;
                ++length;
            }
            EXPECT_GE(length - 1, 25) << "trial " << trial;
        }
    }
}

TEST(PruneLiteral, RemovesLongBranchesOnly)
{
    Mask m(100, 60);
    oracle::fill_rect(m, 5, 5, 81, 1);
    oracle::fill_rect(m, 45, 6, 1, 5);  // short stem of 5
    const Skeleton out = qca::prune(skeleton_of(m), {25, qca::PruneMode::literal});
    // The first arm reaches the threshold and goes together with the
    // junction; with no junction left the other arm and the stem stay.
    EXPECT_FALSE(out.as_mask().test(5, 5));
    EXPECT_FALSE(out.as_mask().test(45, 5));
    EXPECT_TRUE(out.as_mask().test(85, 5));
    EXPECT_TRUE(out.as_mask().test(45, 10));
}

TEST(OrderCenterline, HorizontalLineAscendingX)
{
    const Centerline c = qca::order_centerline(skeleton_of(horizontal_line(10)));
    ASSERT_EQ(c.length(), 10u);
    for (std::size_t i = 0; i < c.length(); ++i) {
        EXPECT_EQ(c.points[i].x, 2 + static_cast<int>(i));
    }
}

TEST(OrderCenterline, SCurveWalkIsAdjacent)
{
    Mask m(60, 40);
    Point last{-1, -1};
    int drawn = 0;
    for (int i = 0; drawn < 50; ++i) {
        const double t = i * 0.05;
        const Point p{5 + static_cast<int>(std::lround(t * 8.0)), 20 + static_cast<int>(std::lround(8.0 * std::sin(t)))};
        if (p == last) {
            continue;
        }
        if (last.x >= 0 && (std::abs(p.x - last.x) > 1 || std::abs(p.y - last.y) > 1)) {
            oracle::draw_line(m, last.x, last.y, p.x, p.y);
        }
        m.set(p);
        last = p;
        drawn = static_cast<int>(m.count());
    }
    const Skeleton s = qca::thin(m);
    ASSERT_TRUE(qca::is_simple_path(s));
    const Centerline c = qca::order_centerline(s);
    EXPECT_EQ(c.length(), s.size());
    EXPECT_TRUE(oracle::is_eight_connected_walk(c.points));
    EXPECT_TRUE(c.points.front() < c.points.back());
}

TEST(OrderCenterline, ResidualJunctionIsNotAPath)
{
    try {
        qca::order_centerline(skeleton_of(perfect_t()));
        FAIL();
    } catch (const qca::Error& e) {
        EXPECT_EQ(e.code(), qca::ErrorCode::not_a_path);
    }
}

TEST(LongestPath, PicksLongestEndToEnd)
{
    Mask m(100, 60);
    oracle::fill_rect(m, 5, 5, 81, 1);
    oracle::fill_rect(m, 20, 6, 1, 10);
    const Centerline c = qca::longest_path(skeleton_of(m));
    EXPECT_EQ(c.length(), 81u);
    EXPECT_EQ(c.points.front(), (Point{5, 5}));
    EXPECT_TRUE(oracle::is_eight_connected_walk(c.points));
}

TEST(CenterlineCsv, HeaderAndRows)
{
    std::ostringstream out;
    qca::write_centerline_csv(out, Centerline{{{1, 2}, {2, 2}}});
    EXPECT_EQ(out.str(), "x,y\n1,2\n2,2\n");
}
