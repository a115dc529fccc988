#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "qca/raster.hpp"

namespace qca {

/// One-pixel-wide medial point set of a mask.
struct Skeleton {
    std::vector<Point> points;  // raster order
    Size source_dims;

    [[nodiscard]] bool empty() const noexcept { return points.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] Mask as_mask() const;

    static Skeleton from_mask(const Mask& mask);
};

/// Ordered centerline, first point to last point.
struct Centerline {
    std::vector<Point> points;

    [[nodiscard]] std::size_t length() const noexcept { return points.size(); }
};

/**
 * Zhang-Suen two-subiteration thinning, run to a fixed point.
 *
 * Candidates are selected with the classic rule table against a snapshot of
 * the image, then deleted in raster order; a candidate that is no longer a
 * simple point at its turn (8-connectivity number != 1) is kept. On shapes
 * where the parallel rule does not break topology the output equals plain
 * Zhang-Suen; where it would (2x2 blocks, two-pixel diagonals) the 8-connected
 * component count is preserved instead.
 *
 * Throws Error(empty_input) for a mask with no foreground.
 */
Skeleton thin(const Mask& mask);

/// Graph neighbors used for skeleton topology: 4-neighbors, plus diagonal
/// neighbors not already linked through a shared 4-neighbor. This keeps
/// staircase corners from counting as junctions.
std::vector<Point> skeleton_neighbors(const Mask& skeleton, Point p);

struct PointClasses {
    std::vector<Point> endpoints;     // 0 or 1 neighbor
    std::vector<Point> bifurcations;  // 3 or more neighbors
};

PointClasses classify_points(const Skeleton& s);

enum class PruneMode {
    spur,     // remove endpoint branches shorter than the threshold
    literal,  // remove endpoint branches of at least the threshold, single pass
};

struct PruneOptions {
    int min_branch = 25;
    PruneMode mode = PruneMode::spur;
};

/// Repeatedly removes the shortest endpoint-to-junction branch shorter than
/// `min_branch` points (junction kept) until none is left. Isolated points
/// are dropped unless the skeleton has nothing else.
Skeleton remove_spurs(const Skeleton& s, int min_branch);

/// Single pass over the original endpoints: the branch from each endpoint to
/// its Euclidean-nearest junction (both included) is removed when it holds at
/// least `min_branch` points.
Skeleton prune_literal(const Skeleton& s, int min_branch);

/// Longest geodesic endpoint-to-endpoint path (unit/sqrt(2) steps), ordered
/// from the end with the smaller (y, x).
Centerline longest_path(const Skeleton& s);

/// Spur mode: remove_spurs followed by longest_path when the result is not
/// yet a single path. Literal mode: prune_literal only.
Skeleton prune(const Skeleton& s, const PruneOptions& options = {});

/// True for a connected skeleton of >= 2 points with exactly two endpoints
/// and no junctions.
bool is_simple_path(const Skeleton& s);

/// Walks a simple-path skeleton from the endpoint with smaller (y, x).
/// Throws Error(not_a_path) otherwise.
Centerline order_centerline(const Skeleton& s);

/// `x,y` per line with a header row.
void write_centerline_csv(std::ostream& out, const Centerline& c);

}  // namespace qca
