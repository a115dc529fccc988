#pragma once

#include <iosfwd>
#include <vector>

#include "qca/geometry.hpp"
#include "qca/raster.hpp"
#include "qca/skeleton.hpp"

namespace qca {

/// Sample spacing along a normal, in pixels.
inline constexpr double kMarchStep = 0.5;

struct WidthEntry {
    Point point;
    int index = 0;       // position on the centerline
    double width = 0.0;  // pixels
};

struct WidthProfile {
    std::vector<WidthEntry> entries;  // ascending centerline index
    int smoothing_window = 5;
    int trimmed = 10;  // points dropped at each end

    [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
};

struct ProfileOptions {
    int window = 5;
    int trim = 10;
};

/// Unit tangents of a moving-average-smoothed copy of the centerline.
/// Interior points use central differences, the two ends one-sided ones.
/// The average window shrinks symmetrically near the ends.
/// Throws Error(too_short) when the centerline is shorter than `window`.
std::vector<Vec2> smooth_tangents(const Centerline& c, int window = 5);

/// Width of the foreground run crossing `p` along `normal`: marches both ways
/// in kMarchStep steps with nearest-pixel sampling, stops on background or at
/// the image edge, and returns the distance between the last interior samples
/// plus one step.
/// Throws Error(invalid_center) when `p` is background.
double width_at(const Mask& mask, Point p, Vec2 normal);

/// Widths along the smoothed normals at every centerline point except
/// `trim` at each end. Requires length > 2 * trim + window.
WidthProfile width_profile(const Mask& mask, const Centerline& c, const ProfileOptions& options = {});

/// `index,x,y,width` with a header row, widths at 3 decimals.
void write_profile_csv(std::ostream& out, const WidthProfile& profile);
WidthProfile read_profile_csv(std::istream& in);

}  // namespace qca
