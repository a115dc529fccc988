#include "qca/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "csv.hpp"
#include "qca/error.hpp"

namespace qca {

namespace {

Vec2 to_vec(Point p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

int nearest(double v) { return static_cast<int>(std::floor(v + 0.5)); }

// Number of consecutive foreground samples after `origin` along `dir`.
int march(const Mask& mask, Vec2 origin, Vec2 dir)
{
    int steps = 0;
    for (;;) {
        const Vec2 q = origin + (kMarchStep * (steps + 1)) * dir;
        const int x = nearest(q.x);
        const int y = nearest(q.y);
        if (!mask.contains(x, y) || !mask.test(x, y)) {
            return steps;
        }
        ++steps;
    }
}

}  // namespace

std::vector<Vec2> smooth_tangents(const Centerline& c, int window)
{
    const int n = static_cast<int>(c.length());
    if (window < 1) {
        throw Error(ErrorCode::out_of_range, "smoothing window must be >= 1");
    }
    if (n < window || n < 2) {
        throw Error(ErrorCode::too_short, "centerline of " + std::to_string(n) +
                                              " points is shorter than the smoothing window " +
                                              std::to_string(window));
    }
    const int half = window / 2;
    std::vector<Vec2> smoothed(n);
    for (int i = 0; i < n; ++i) {
        const int h = std::min({half, i, n - 1 - i});
        Vec2 sum{};
        for (int j = i - h; j <= i + h; ++j) {
            sum = sum + to_vec(c.points[j]);
        }
        smoothed[i] = (1.0 / (2 * h + 1)) * sum;
    }

    std::vector<Vec2> tangents(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(i - 1, 0);
        const int hi = std::min(i + 1, n - 1);
        Vec2 t = smoothed[hi] - smoothed[lo];
        if (norm(t) < 1e-12) {
            t = to_vec(c.points[hi]) - to_vec(c.points[lo]);
        }
        const double len = norm(t);
        tangents[i] = len < 1e-12 ? Vec2{1.0, 0.0} : (1.0 / len) * t;
    }
    return tangents;
}

double width_at(const Mask& mask, Point p, Vec2 normal)
{
    if (!mask.test(p)) {
        throw Error(ErrorCode::invalid_center,
                    "centerline point (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                        ") is background");
    }
    const double len = norm(normal);
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw Error(ErrorCode::out_of_range, "normal must be a finite nonzero vector");
    }
    const Vec2 dir = (1.0 / len) * normal;
    const Vec2 origin = to_vec(p);
    const int forward = march(mask, origin, dir);
    const int backward = march(mask, origin, -1.0 * dir);
    return kMarchStep * (forward + backward) + kMarchStep;
}

WidthProfile width_profile(const Mask& mask, const Centerline& c, const ProfileOptions& options)
{
    const int n = static_cast<int>(c.length());
    if (options.trim < 0) {
        throw Error(ErrorCode::out_of_range, "trim must be >= 0");
    }
    if (n <= 2 * options.trim + options.window) {
        throw Error(ErrorCode::too_short,
                    "centerline of " + std::to_string(n) + " points needs more than " +
                        std::to_string(2 * options.trim + options.window) + " (2 x trim + window)");
    }
    const auto tangents = smooth_tangents(c, options.window);
    WidthProfile profile;
    profile.smoothing_window = options.window;
    profile.trimmed = options.trim;
    profile.entries.reserve(n - 2 * options.trim);
    for (int i = options.trim; i < n - options.trim; ++i) {
        const Point p = c.points[i];
        profile.entries.push_back({p, i, width_at(mask, p, perpendicular(tangents[i]))});
    }
    return profile;
}

void write_profile_csv(std::ostream& out, const WidthProfile& profile)
{
    out << "index,x,y,width\n";
    char buf[32];
    for (const auto& e : profile.entries) {
        std::snprintf(buf, sizeof buf, "%.3f", e.width);
        out << e.index << ',' << e.point.x << ',' << e.point.y << ',' << buf << '\n';
    }
}

WidthProfile read_profile_csv(std::istream& in)
{
    WidthProfile profile;
    const auto rows = csv::read(in, {"index", "x", "y", "width"});
    for (const auto& row : rows) {
        WidthEntry e;
        e.index = csv::to_int(row.fields[0], row.line);
        e.point = {csv::to_int(row.fields[1], row.line), csv::to_int(row.fields[2], row.line)};
        e.width = csv::to_double(row.fields[3], row.line);
        if (!(e.width > 0.0) || !std::isfinite(e.width)) {
            throw Error(ErrorCode::format, "line " + std::to_string(row.line) + ": width must be positive");
        }
        profile.entries.push_back(e);
    }
    std::stable_sort(profile.entries.begin(), profile.entries.end(),
                     [](const WidthEntry& a, const WidthEntry& b) { return a.index < b.index; });
    return profile;
}

}  // namespace qca
