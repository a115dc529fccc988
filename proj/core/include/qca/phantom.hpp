#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qca/geometry.hpp"
#include "qca/raster.hpp"

namespace qca {

/// Synthetic vessel with a single focal narrowing.
struct TubeSpec {
    std::vector<Vec2> control_points;  // pixels
    double base_width = 20.0;          // pixels, >= 4
    double stenosis_center = 0.5;      // arc-length fraction
    double stenosis_depth = 0.5;       // [0, 1); true percent stenosis = depth * 100
    double stenosis_extent = 0.15;     // arc-length fraction covered by the narrowing
    std::uint64_t seed = 0;
};

struct VideoSpec {
    TubeSpec tube;
    int n_frames = 0;
    std::vector<double> contrast_envelope;  // per frame, in [0, 1], unimodal
    double noise_sigma = 0.0;               // intensity units
};

struct WidthSample {
    double t = 0.0;  // arc-length fraction
    Vec2 position;
    double width = 0.0;
};

struct RenderedTube {
    Mask mask;
    std::vector<WidthSample> width_field;  // dense, ascending t
    double length = 0.0;                   // pixels

    /// Nearest dense sample to arc-length fraction t.
    [[nodiscard]] const WidthSample& at(double t) const;
};

inline constexpr std::uint8_t kPhantomBackground = 200;
inline constexpr double kPhantomMaxContrast = 120.0;

/// Analytic width: base * (1 - depth * bump(t)) with a raised-cosine bump of
/// full width `stenosis_extent` centred on `stenosis_center`.
double tube_width(const TubeSpec& spec, double t);

/// Throws Error(geometry) when a spec invariant fails or the tube would
/// leave the canvas.
void validate(const TubeSpec& spec, Size canvas);
void validate(const VideoSpec& spec, Size canvas);

/// Uniform Catmull-Rom curve through the control points,
/// resampled by arc length; the mask holds every pixel centre within w(t)/2
/// of the curve.
RenderedTube render_mask(const TubeSpec& spec, Size canvas);

/// Background 200, tube darkened by envelope[i] * 120, plus seeded Gaussian
/// noise; deterministic in (spec, canvas).
std::vector<GrayImage> render_video(const VideoSpec& spec, Size canvas);

/// Ramp up over the first quarter, plateau at 1, wash out over the last quarter.
std::vector<double> ramp_plateau_washout(int n_frames);

enum class TubeShape { straight, c_curve, s_curve };

const char* to_string(TubeShape s) noexcept;
TubeShape tube_shape_from_string(std::string_view name);

/// Control points for a gently tilted straight tube, a C-shaped arc, or an
/// S-shaped curve spanning most of the canvas.
std::vector<Vec2> shape_control_points(TubeShape shape, Size canvas);

TubeSpec tube_spec_from_json(std::string_view text);
std::string to_json(const TubeSpec& spec, int indent = 2);
VideoSpec video_spec_from_json(std::string_view text);
std::string to_json(const VideoSpec& spec, int indent = 2);

}  // namespace qca
