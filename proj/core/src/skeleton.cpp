#include "qca/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <unordered_map>

#include "qca/error.hpp"

namespace qca {

namespace {

// Padded working grid so neighbor reads never need bounds checks.
class PaddedGrid {
public:
    explicit PaddedGrid(const Mask& mask)
        : width_(mask.width() + 2), height_(mask.height() + 2),
          cells_(static_cast<std::size_t>(width_) * height_, 0)
    {
        for (int y = 0; y < mask.height(); ++y) {
            for (int x = 0; x < mask.width(); ++x) {
                if (mask.test(x, y)) {
                    (*this)(x, y) = 1;
                }
            }
        }
    }

    std::uint8_t& operator()(int x, int y) { return cells_[index(x, y)]; }
    std::uint8_t operator()(int x, int y) const { return cells_[index(x, y)]; }

    // P2..P9 of the classic formulation: N, NE, E, SE, S, SW, W, NW.
    std::array<int, 8> ring(int x, int y) const
    {
        const auto& g = *this;
        return {g(x, y - 1),     g(x + 1, y - 1), g(x + 1, y), g(x + 1, y + 1),
                g(x, y + 1),     g(x - 1, y + 1), g(x - 1, y), g(x - 1, y - 1)};
    }

private:
    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y + 1) * width_ + (x + 1);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> cells_;
};

bool zhang_suen_candidate(const std::array<int, 8>& p, int subiteration)
{
    const int b = p[0] + p[1] + p[2] + p[3] + p[4] + p[5] + p[6] + p[7];
    if (b < 2 || b > 6) {
        return false;
    }
    int a = 0;
    for (int i = 0; i < 8; ++i) {
        if (p[i] == 0 && p[(i + 1) % 8] == 1) {
            ++a;
        }
    }
    if (a != 1) {
        return false;
    }
    const int n = p[0], e = p[2], s = p[4], w = p[6];
    if (subiteration == 0) {
        return n * e * s == 0 && e * s * w == 0;
    }
    return n * e * w == 0 && n * s * w == 0;
}

// Yokoi 8-connectivity number; 1 means the pixel is simple.
int connectivity_number(const std::array<int, 8>& p)
{
    // Reorder to E, NE, N, NW, W, SW, S, SE as complements.
    const std::array<int, 8> c = {1 - p[2], 1 - p[1], 1 - p[0], 1 - p[7],
                                  1 - p[6], 1 - p[5], 1 - p[4], 1 - p[3]};
    int sum = 0;
    for (int k = 0; k < 8; k += 2) {
        sum += c[k] - c[k] * c[(k + 1) % 8] * c[(k + 2) % 8];
    }
    return sum;
}

int key_of(Point p, int width) { return p.y * width + p.x; }

int degree(const Mask& m, Point p) { return static_cast<int>(skeleton_neighbors(m, p).size()); }

struct Spur {
    std::vector<Point> points;  // endpoint first, junction excluded
};

// Follows degree-2 points from an endpoint. Returns the branch when it ends
// at a junction within `limit` points; nullopt when it reaches another
// endpoint or grows past the limit.
std::optional<Spur> trace_spur(const Mask& m, Point endpoint, std::size_t limit)
{
    Spur spur;
    spur.points.push_back(endpoint);
    auto first = skeleton_neighbors(m, endpoint);
    if (first.size() != 1) {
        return std::nullopt;
    }
    Point prev = endpoint;
    Point cur = first.front();
    while (spur.points.size() < limit) {
        auto nb = skeleton_neighbors(m, cur);
        if (nb.size() >= 3) {
            return spur;
        }
        if (nb.size() <= 1) {
            return std::nullopt;
        }
        spur.points.push_back(cur);
        Point next = nb[0] == prev ? nb[1] : nb[0];
        prev = cur;
        cur = next;
    }
    return std::nullopt;
}

struct Graph {
    std::vector<Point> nodes;
    std::vector<std::vector<std::pair<int, double>>> adj;
};

Graph build_graph(const Mask& m, const std::vector<Point>& points)
{
    Graph g;
    g.nodes = points;
    std::unordered_map<int, int> index;
    index.reserve(points.size() * 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        index.emplace(key_of(points[i], m.width()), static_cast<int>(i));
    }
    g.adj.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (const auto& q : skeleton_neighbors(m, points[i])) {
            const bool diagonal = q.x != points[i].x && q.y != points[i].y;
            g.adj[i].emplace_back(index.at(key_of(q, m.width())), diagonal ? std::sqrt(2.0) : 1.0);
        }
    }
    return g;
}

struct ShortestPaths {
    std::vector<double> dist;
    std::vector<int> prev;
};

ShortestPaths dijkstra(const Graph& g, int source)
{
    const double inf = std::numeric_limits<double>::infinity();
    ShortestPaths sp{std::vector<double>(g.nodes.size(), inf), std::vector<int>(g.nodes.size(), -1)};
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    sp.dist[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (d > sp.dist[u]) {
            continue;
        }
        for (const auto& [v, w] : g.adj[u]) {
            if (d + w < sp.dist[v]) {
                sp.dist[v] = d + w;
                sp.prev[v] = u;
                queue.emplace(sp.dist[v], v);
            }
        }
    }
    return sp;
}

std::vector<int> unwind(const ShortestPaths& sp, int target)
{
    std::vector<int> path;
    for (int v = target; v != -1; v = sp.prev[v]) {
        path.push_back(v);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

Mask Skeleton::as_mask() const { return Mask::from_points(source_dims, points); }

Skeleton Skeleton::from_mask(const Mask& mask) { return {mask.points(), mask.size()}; }

Skeleton thin(const Mask& mask)
{
    if (mask.width() == 0 || mask.count() == 0) {
        throw Error(ErrorCode::empty_input, "cannot thin a mask with no foreground");
    }
    PaddedGrid grid(mask);
    std::vector<Point> active = mask.points();
    std::vector<Point> candidates;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int sub = 0; sub < 2; ++sub) {
            candidates.clear();
            for (const auto& p : active) {
                if (zhang_suen_candidate(grid.ring(p.x, p.y), sub)) {
                    candidates.push_back(p);
                }
            }
            for (const auto& p : candidates) {
                if (connectivity_number(grid.ring(p.x, p.y)) == 1) {
                    grid(p.x, p.y) = 0;
                    changed = true;
                }
            }
            std::erase_if(active, [&](Point p) { return grid(p.x, p.y) == 0; });
        }
    }
    return {std::move(active), mask.size()};
}

std::vector<Point> skeleton_neighbors(const Mask& m, Point p)
{
    std::vector<Point> out;
    out.reserve(4);
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) {
                continue;
            }
            Point q{p.x + dx, p.y + dy};
            if (!m.test(q)) {
                continue;
            }
            if (dx != 0 && dy != 0 && (m.test(p.x + dx, p.y) || m.test(p.x, p.y + dy))) {
                continue;
            }
            out.push_back(q);
        }
    }
    return out;
}

PointClasses classify_points(const Skeleton& s)
{
    PointClasses out;
    if (s.empty()) {
        return out;
    }
    const Mask m = s.as_mask();
    for (const auto& p : s.points) {
        const int d = degree(m, p);
        if (d <= 1) {
            out.endpoints.push_back(p);
        } else if (d >= 3) {
            out.bifurcations.push_back(p);
        }
    }
    return out;
}

Skeleton remove_spurs(const Skeleton& s, int min_branch)
{
    Mask m = s.as_mask();
    std::vector<Point> points = s.points;
    const auto limit = static_cast<std::size_t>(std::max(min_branch, 0));
    for (;;) {
        if (points.size() <= 1) {
            break;
        }
        std::vector<Point> isolated;
        for (const auto& p : points) {
            if (degree(m, p) == 0) {
                isolated.push_back(p);
            }
        }
        if (!isolated.empty()) {
            if (isolated.size() == points.size()) {
                isolated.erase(isolated.begin());
            }
            for (const auto& p : isolated) {
                m.set(p, false);
            }
            points = m.points();
            continue;
        }

        std::optional<Spur> shortest;
        for (const auto& p : points) {
            if (degree(m, p) != 1) {
                continue;
            }
            auto spur = trace_spur(m, p, limit);
            if (spur && (!shortest || spur->points.size() < shortest->points.size())) {
                shortest = std::move(spur);
            }
        }
        if (!shortest) {
            break;
        }
        for (const auto& p : shortest->points) {
            m.set(p, false);
        }
        points = m.points();
    }
    return {std::move(points), s.source_dims};
}

Skeleton prune_literal(const Skeleton& s, int min_branch)
{
    if (s.empty()) {
        return s;
    }
    Mask m = s.as_mask();
    std::vector<Point> endpoints;
    std::vector<Point> bifurcations;
    for (const auto& p : s.points) {
        const int d = degree(m, p);
        if (d == 1) {
            endpoints.push_back(p);
        } else if (d >= 3) {
            bifurcations.push_back(p);
        }
    }
    for (const auto& e : endpoints) {
        if (!m.test(e)) {
            continue;
        }
        std::optional<Point> nearest;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : bifurcations) {
            if (!m.test(b)) {
                continue;
            }
            const double d = std::hypot(double(b.x - e.x), double(b.y - e.y));
            if (d < best) {
                best = d;
                nearest = b;
            }
        }
        if (!nearest) {
            continue;
        }
        const auto current = m.points();
        const Graph g = build_graph(m, current);
        const auto source = std::lower_bound(current.begin(), current.end(), e) - current.begin();
        const auto target = std::lower_bound(current.begin(), current.end(), *nearest) - current.begin();
        const auto sp = dijkstra(g, static_cast<int>(source));
        if (!std::isfinite(sp.dist[target])) {
            continue;
        }
        const auto branch = unwind(sp, static_cast<int>(target));
        if (static_cast<int>(branch.size()) >= min_branch) {
            for (int v : branch) {
                m.set(current[v], false);
            }
        }
    }
    return Skeleton::from_mask(m);
}

Centerline longest_path(const Skeleton& s)
{
    if (s.empty()) {
        throw Error(ErrorCode::empty_input, "longest path of an empty skeleton");
    }
    const Mask m = s.as_mask();
    const Graph g = build_graph(m, s.points);

    std::vector<int> sources;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (g.adj[i].size() <= 1) {
            sources.push_back(static_cast<int>(i));
        }
    }
    if (sources.empty()) {
        // Closed loops only: double sweep from the first point.
        const auto sp = dijkstra(g, 0);
        int far = 0;
        for (std::size_t i = 0; i < sp.dist.size(); ++i) {
            if (std::isfinite(sp.dist[i]) && sp.dist[i] > sp.dist[far]) {
                far = static_cast<int>(i);
            }
        }
        sources.push_back(far);
    }

    double best = -1.0;
    std::vector<int> best_path;
    for (int src : sources) {
        const auto sp = dijkstra(g, src);
        for (std::size_t t = 0; t < sp.dist.size(); ++t) {
            if (std::isfinite(sp.dist[t]) && sp.dist[t] > best + 1e-9) {
                best = sp.dist[t];
                best_path = unwind(sp, static_cast<int>(t));
            }
        }
    }

    Centerline c;
    c.points.reserve(best_path.size());
    for (int v : best_path) {
        c.points.push_back(g.nodes[v]);
    }
    if (c.points.size() > 1 && c.points.back() < c.points.front()) {
        std::reverse(c.points.begin(), c.points.end());
    }
    return c;
}

Skeleton prune(const Skeleton& s, const PruneOptions& options)
{
    if (options.mode == PruneMode::literal) {
        return prune_literal(s, options.min_branch);
    }
    Skeleton out = remove_spurs(s, options.min_branch);
    if (out.size() > 1 && !is_simple_path(out)) {
        auto path = longest_path(out);
        std::sort(path.points.begin(), path.points.end());
        out.points = std::move(path.points);
    }
    return out;
}

bool is_simple_path(const Skeleton& s)
{
    if (s.size() < 2) {
        return false;
    }
    const Mask m = s.as_mask();
    int ends = 0;
    for (const auto& p : s.points) {
        const int d = degree(m, p);
        if (d == 1) {
            ++ends;
        } else if (d != 2) {
            return false;
        }
    }
    return ends == 2 && connected_components(m).size() == 1;
}

Centerline order_centerline(const Skeleton& s)
{
    if (!is_simple_path(s)) {
        const auto classes = classify_points(s);
        throw Error(ErrorCode::not_a_path,
                    "skeleton is not a single path (" + std::to_string(classes.endpoints.size()) +
                        " endpoints, " + std::to_string(classes.bifurcations.size()) +
                        " bifurcations); prune further");
    }
    const Mask m = s.as_mask();
    Point start = s.points.front();
    for (const auto& p : s.points) {
        if (degree(m, p) == 1) {
            start = p;  // points are in raster order, so the first hit is the smaller end
            break;
        }
    }
    Centerline c;
    c.points.reserve(s.size());
    c.points.push_back(start);
    Point prev = start;
    Point cur = skeleton_neighbors(m, start).front();
    while (true) {
        c.points.push_back(cur);
        auto nb = skeleton_neighbors(m, cur);
        if (nb.size() == 1) {
            break;
        }
        Point next = nb[0] == prev ? nb[1] : nb[0];
        prev = cur;
        cur = next;
    }
    return c;
}

void write_centerline_csv(std::ostream& out, const Centerline& c)
{
    out << "x,y\n";
    for (const auto& p : c.points) {
        out << p.x << ',' << p.y << '\n';
    }
}

}  // namespace qca
