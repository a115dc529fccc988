#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qca/profile.hpp"
#include "qca/raster.hpp"

namespace qca {

/// Severity cutoffs in percent stenosis; a value on a cutoff takes the higher class.
inline constexpr double kSevereThreshold = 70.0;
inline constexpr double kModerateThreshold = 50.0;
/// Side of the square lesion box, in pixels.
inline constexpr int kLesionBoxSide = 64;

struct FrameWidthStats {
    double max_mean = 0.0;  // mean of the k_max largest widths
    double min_mean = 0.0;  // mean of the k_min smallest widths
    Point min_location;     // point of the single smallest width
    int frame_id = 0;
};

enum class Severity { mild, moderate, severe };

const char* to_string(Severity s) noexcept;
Severity severity_from_string(std::string_view name);

/// Axis-aligned square, top-left corner at (x, y).
struct Box {
    int x = 0;
    int y = 0;
    int side = 0;

    friend bool operator==(const Box&, const Box&) = default;
};

struct StenosisAssessment {
    double percent = 0.0;
    Point location;
    Box box;
    std::vector<FrameWidthStats> per_frame;
    Severity severity = Severity::mild;
};

/// Throws Error(empty_profile) on an empty profile. k values are clamped to
/// the profile length; ties for the minimum go to the smaller centerline index.
FrameWidthStats frame_stats(const WidthProfile& profile, int frame_id = 0, int k_max = 30,
                            int k_min = 3);

/// Severity for a percent in [0, 100]; Error(out_of_range) otherwise.
Severity classify_severity(double percent);

/**
 * Combines one to five key-frame statistics of a video.
 *
 * percent = (1 - mean(min_mean) / mean(max_mean)) * 100, where both means run
 * across frames. The lesion is placed at the minimum-width point of the frame
 * holding the median min_mean (lower median for even counts), and the box is
 * a kLesionBoxSide square centred there and shifted to fit inside `canvas`.
 */
StenosisAssessment assess(std::span<const FrameWidthStats> stats, Size canvas);

/// Square box of `side` centred on `center`, moved to lie inside `canvas`
/// (shrunk only when the canvas itself is smaller).
Box lesion_box(Point center, Size canvas, int side = kLesionBoxSide);

/// The assessment with the larger percent; ties keep `a`.
StenosisAssessment aggregate_views(const StenosisAssessment& a, const StenosisAssessment& b);

/// {percent, severity, location:{x,y}, box:{x,y,side},
///  frames:[{frame_id, max_mean, min_mean, min_location:{x,y}}]}
std::string to_json(const StenosisAssessment& a, int indent = 2);
StenosisAssessment assessment_from_json(std::string_view text);

}  // namespace qca
