#pragma once

// Independent reference implementations and generators used by the tests.
// None of this code calls into the library under test beyond its data types.

#include <cstdint>
#include <vector>

#include "qca/augment.hpp"
#include "qca/geometry.hpp"
#include "qca/random.hpp"
#include "qca/raster.hpp"

namespace oracle {

/// Classic parallel two-subiteration Zhang-Suen thinning, transcribed from
/// the 1984 rule table (P2..P9 clockwise from north).
qca::Mask zhang_suen(const qca::Mask& mask);

/// Euclidean distance from each pixel centre to the nearest background pixel
/// centre, with everything outside the image counted as background. Brute
/// force over growing square rings. Row-major; 0 on background.
std::vector<double> distance_transform(const qca::Mask& mask);

/// Unclipped adaptive histogram equalisation: per-tile LUT
/// round(255 * cdf / tile_area) over ceil-sized tiles padded by edge
/// replication, blended bilinearly between tile centres.
qca::GrayImage adaptive_equalize(const qca::GrayImage& img, int tiles_x, int tiles_y);

/// 1-D unsharp mask of a row with replicated borders and a sampled, normalised
/// Gaussian of radius ceil(3 sigma).
std::vector<double> unsharp_row(const std::vector<double>& row, double strength, double sigma);

/// Union of random filled disks and rectangles on a small canvas.
qca::Mask random_blob(qca::Rng& rng, int width, int height);

/// A one-pixel-wide random tree: a horizontal trunk with vertical branches,
/// some of which carry horizontal twigs. Branches are spaced so the result
/// has no cycles and no touching arms.
struct Tree {
    qca::Mask mask;
    int trunk_length = 0;
};
Tree random_tree(qca::Rng& rng, int min_branch);

/// Filled bar of the given size at (x0, y0).
void fill_rect(qca::Mask& m, int x0, int y0, int w, int h);
/// Filled disk, pixel centres within radius.
void fill_disk(qca::Mask& m, double cx, double cy, double r);
/// 8-connected digital line.
void draw_line(qca::Mask& m, int x0, int y0, int x1, int y1);

/// True when consecutive points are 8-adjacent and no point repeats.
bool is_eight_connected_walk(const std::vector<qca::Point>& pts);

/// Brute-force 8-connected component count (flood fill over a copy).
int component_count(const qca::Mask& m);

}  // namespace oracle
