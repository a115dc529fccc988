#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "qca/error.hpp"
#include "qca/phantom.hpp"
#include "qca/profile.hpp"
#include "qca/skeleton.hpp"

using qca::Centerline;
using qca::Mask;
using qca::Point;
using qca::Vec2;

namespace {

Centerline straight(int x0, int y0, int dx, int dy, int n)
{
    Centerline c;
    for (int i = 0; i < n; ++i) {
        c.points.push_back({x0 + i * dx, y0 + i * dy});
    }
    return c;
}

Centerline measured_centerline(const Mask& m)
{
    const auto s = qca::prune(qca::thin(m));
    return qca::is_simple_path(s) ? qca::order_centerline(s) : qca::longest_path(s);
}

}  // namespace

TEST(SmoothTangents, HorizontalLine)
{
    for (auto t : qca::smooth_tangents(straight(0, 5, 1, 0, 20))) {
        EXPECT_NEAR(t.x, 1.0, 1e-12);
        EXPECT_NEAR(t.y, 0.0, 1e-12);
    }
}

TEST(SmoothTangents, VerticalLineConsistentSign)
{
    const auto ts = qca::smooth_tangents(straight(3, 0, 0, 1, 20));
    for (auto t : ts) {
        EXPECT_NEAR(t.x, 0.0, 1e-12);
        EXPECT_NEAR(t.y, ts.front().y, 1e-12);
        EXPECT_NEAR(std::abs(t.y), 1.0, 1e-12);
    }
}

TEST(SmoothTangents, QuarterCircleWithinSixDegrees)
{
    // Digital radius-30 quarter arc (nearest pixel per column in one octant,
    // mirrored into the other) against the analytic circle tangent.
    const double r = 30.0;
    const Vec2 centre{40.0, 40.0};
    Mask m(80, 80);
    for (int x = 0; x <= 30; ++x) {
        const double y = std::sqrt(r * r - x * x);
        if (x <= y) {
            const int yy = static_cast<int>(std::lround(y));
            m.set(40 + x, 40 - yy);
            m.set(40 + yy, 40 - x);
        }
    }
    const auto s = qca::thin(m);
    const Centerline c = qca::order_centerline(s);
    const auto ts = qca::smooth_tangents(c, 5);
    for (std::size_t i = 0; i < c.length(); ++i) {
        const Vec2 d{c.points[i].x - centre.x, c.points[i].y - centre.y};
        // Tangent of a circle is perpendicular to the radius.
        const Vec2 analytic = qca::perpendicular((1.0 / qca::norm(d)) * d);
        const double cosine = std::abs(qca::dot(analytic, ts[i]));
        EXPECT_GE(cosine, std::cos(6.0 * std::numbers::pi / 180.0)) << "point " << i;
    }
}

TEST(SmoothTangents, ShortCenterlineIsTooShort)
{
    try {
        qca::smooth_tangents(straight(0, 0, 1, 0, 4), 5);
        FAIL();
    } catch (const qca::Error& e) {
        EXPECT_EQ(e.code(), qca::ErrorCode::too_short);
    }
}

TEST(WidthAt, AxisAlignedBarOfHeight11)
{
    Mask m(40, 21);
    oracle::fill_rect(m, 0, 5, 40, 11);
    const double w = qca::width_at(m, {20, 10}, {0.0, 1.0});
    EXPECT_GE(w, 10.0);
    EXPECT_LE(w, 12.0);
}

TEST(WidthAt, RotatedBarMatchesDistanceTransform)
{
    // Bar of thickness 11 along the diagonal.
    Mask m(60, 60);
    for (int y = 0; y < 60; ++y) {
        for (int x = 0; x < 60; ++x) {
            if (std::abs((x - y) / std::sqrt(2.0)) <= 5.5) {
                m.set(x, y);
            }
        }
    }
    const double w = qca::width_at(m, {30, 30}, {std::sqrt(0.5), -std::sqrt(0.5)});
    const auto edt = oracle::distance_transform(m);
    const double oracle_width = 2.0 * edt[30 * 60 + 30];
    EXPECT_GE(w, 9.5);
    EXPECT_LE(w, 12.5);
    EXPECT_GE(oracle_width, 9.5);
    EXPECT_LE(oracle_width, 12.5);
}

TEST(WidthAt, OnePixelLine)
{
    Mask m(20, 5);
    oracle::fill_rect(m, 0, 2, 20, 1);
    const double w = qca::width_at(m, {10, 2}, {0.0, 1.0});
    EXPECT_GT(w, 0.0);
    EXPECT_LE(w, 2.0);
}

TEST(WidthAt, BackgroundCenterIsInvalid)
{
    try {
        qca::width_at(Mask(5, 5), {2, 2}, {0.0, 1.0});
        FAIL();
    } catch (const qca::Error& e) {
        EXPECT_EQ(e.code(), qca::ErrorCode::invalid_center);
    }
}

TEST(WidthAt, StopsAtImageEdge)
{
    Mask m(10, 10);
    oracle::fill_rect(m, 0, 0, 10, 10);
    // Last interior samples at x = 9.0 and x = -0.5 (rounds onto column 0).
    const double w = qca::width_at(m, {5, 5}, {1.0, 0.0});
    EXPECT_DOUBLE_EQ(w, 4.0 + 5.5 + 0.5);
}

TEST(WidthProfile, UniformStraightTube)
{
    qca::TubeSpec spec;
    spec.control_points = {{20.0, 60.0}, {120.0, 60.0}, {220.0, 60.0}};
    spec.base_width = 15.0;
    spec.stenosis_depth = 0.0;
    const auto rendered = qca::render_mask(spec, {240, 120});
    const auto c = measured_centerline(rendered.mask);
    const auto profile = qca::width_profile(rendered.mask, c);
    ASSERT_FALSE(profile.empty());
    for (const auto& e : profile.entries) {
        EXPECT_NEAR(e.width, 15.0, 1.5) << "index " << e.index;
    }
}

TEST(WidthProfile, MinimumNearConstructedNarrowing)
{
    qca::TubeSpec spec;
    spec.control_points = {{20.0, 60.0}, {120.0, 60.0}, {220.0, 60.0}};
    spec.base_width = 20.0;
    spec.stenosis_depth = 0.5;
    const auto rendered = qca::render_mask(spec, {240, 120});
    const auto c = measured_centerline(rendered.mask);
    const auto profile = qca::width_profile(rendered.mask, c);
    const auto target = rendered.at(spec.stenosis_center).position;
    // Centerline index closest to the analytic narrowing centre.
    int closest = 0;
    double best = 1e9;
    for (std::size_t i = 0; i < c.length(); ++i) {
        const double d = std::hypot(c.points[i].x - target.x, c.points[i].y - target.y);
        if (d < best) {
            best = d;
            closest = static_cast<int>(i);
        }
    }
    // The flat bottom of the bump spans several points; take the middle of the
    // run of minimum widths.
    double minimum = 1e9;
    for (const auto& e : profile.entries) {
        minimum = std::min(minimum, e.width);
    }
    std::vector<int> at_min;
    for (const auto& e : profile.entries) {
        if (e.width == minimum) {
            at_min.push_back(e.index);
        }
    }
    const int middle = at_min[at_min.size() / 2];
    EXPECT_LE(std::abs(middle - closest), 5);
}

TEST(WidthProfile, TooShortCenterline)
{
    Mask m(40, 5);
    oracle::fill_rect(m, 0, 2, 40, 1);
    try {
        qca::width_profile(m, straight(5, 2, 1, 0, 25), {5, 10});
        FAIL();
    } catch (const qca::Error& e) {
        EXPECT_EQ(e.code(), qca::ErrorCode::too_short);
    }
}

TEST(WidthProfile, EntryCountAndIndices)
{
    Mask m(60, 9);
    oracle::fill_rect(m, 0, 2, 60, 5);
    const auto c = straight(5, 4, 1, 0, 50);
    const auto p = qca::width_profile(m, c, {5, 10});
    ASSERT_EQ(p.size(), 30u);
    EXPECT_EQ(p.entries.front().index, 10);
    EXPECT_EQ(p.entries.back().index, 39);
    for (const auto& e : p.entries) {
        EXPECT_GE(e.width, 1.0);
        EXPECT_TRUE(std::isfinite(e.width));
    }
}

TEST(WidthProfile, RotationBy90KeepsWidthMultiset)
{
    qca::TubeSpec spec;
    spec.control_points = {{20.0, 50.0}, {70.0, 40.0}, {140.0, 60.0}};
    spec.base_width = 14.0;
    spec.stenosis_depth = 0.4;
    const auto rendered = qca::render_mask(spec, {160, 100});
    const Mask& m = rendered.mask;
    Mask rotated(m.height(), m.width());
    for (auto p : m.points()) {
        rotated.set(m.height() - 1 - p.y, p.x);
    }
    const auto c = measured_centerline(m);
    Centerline rc;
    for (auto p : c.points) {
        rc.points.push_back({m.height() - 1 - p.y, p.x});
    }
    auto a = qca::width_profile(m, c);
    auto b = qca::width_profile(rotated, rc);
    ASSERT_EQ(a.size(), b.size());
    std::vector<double> wa;
    std::vector<double> wb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        wa.push_back(a.entries[i].width);
        wb.push_back(b.entries[i].width);
    }
    std::sort(wa.begin(), wa.end());
    std::sort(wb.begin(), wb.end());
    for (std::size_t i = 0; i < wa.size(); ++i) {
        EXPECT_LE(std::abs(wa[i] - wb[i]), 1.0);
    }
}

TEST(ProfileCsv, RoundTripAtThreeDecimals)
{
    qca::WidthProfile p;
    p.entries = {{{3, 4}, 10, 12.3456}, {{4, 4}, 11, 7.0}};
    std::stringstream ss;
    qca::write_profile_csv(ss, p);
    EXPECT_EQ(ss.str(), "index,x,y,width\n10,3,4,12.346\n11,4,4,7.000\n");
    const auto back = qca::read_profile_csv(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_DOUBLE_EQ(back.entries[0].width, 12.346);
    EXPECT_EQ(back.entries[1].point, (Point{4, 4}));
}
