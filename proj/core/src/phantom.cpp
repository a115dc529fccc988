#include "qca/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "json_support.hpp"
#include "qca/error.hpp"
#include "qca/random.hpp"

namespace qca {

namespace {

constexpr double kResampleSpacing = 0.25;  // pixels along the curve
constexpr int kSubstepsPerSegment = 256;

Vec2 catmull_rom(Vec2 p0, Vec2 p1, Vec2 p2, Vec2 p3, double u)
{
    const double u2 = u * u;
    const double u3 = u2 * u;
    return 0.5 * ((2.0 * p1) + u * (p2 - p0) + u2 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                  u3 * (3.0 * p1 - p0 - 3.0 * p2 + p3));
}

std::vector<Vec2> dense_curve(const std::vector<Vec2>& cp)
{
    const std::size_t n = cp.size();
    auto point = [&](std::ptrdiff_t i) -> Vec2 {
        if (i < 0) {
            return 2.0 * cp[0] - cp[1];
        }
        if (i >= static_cast<std::ptrdiff_t>(n)) {
            return 2.0 * cp[n - 1] - cp[n - 2];
        }
        return cp[static_cast<std::size_t>(i)];
    };
    std::vector<Vec2> out;
    out.reserve((n - 1) * kSubstepsPerSegment + 1);
    for (std::size_t s = 0; s + 1 < n; ++s) {
        const auto i = static_cast<std::ptrdiff_t>(s);
        for (int k = 0; k < kSubstepsPerSegment; ++k) {
            out.push_back(catmull_rom(point(i - 1), point(i), point(i + 1), point(i + 2),
                                      static_cast<double>(k) / kSubstepsPerSegment));
        }
    }
    out.push_back(cp.back());
    return out;
}

bool inside(Vec2 p, Size canvas)
{
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= canvas.width - 1.0 && p.y <= canvas.height - 1.0;
}

[[noreturn]] void geometry(const std::string& message) { throw Error(ErrorCode::geometry, message); }

}  // namespace

const WidthSample& RenderedTube::at(double t) const
{
    if (width_field.empty()) {
        throw Error(ErrorCode::empty_input, "tube has no width samples");
    }
    auto it = std::lower_bound(width_field.begin(), width_field.end(), t,
                               [](const WidthSample& s, double v) { return s.t < v; });
    if (it == width_field.end()) {
        return width_field.back();
    }
    if (it != width_field.begin() && (t - std::prev(it)->t) < (it->t - t)) {
        return *std::prev(it);
    }
    return *it;
}

double tube_width(const TubeSpec& spec, double t)
{
    const double half = 0.5 * spec.stenosis_extent;
    const double offset = t - spec.stenosis_center;
    double bump = 0.0;
    if (std::abs(offset) <= half) {
        bump = 0.5 * (1.0 + std::cos(M_PI * offset / half));
    }
    return spec.base_width * (1.0 - spec.stenosis_depth * bump);
}

void validate(const TubeSpec& spec, Size canvas)
{
    if (canvas.width <= 0 || canvas.height <= 0) {
        geometry("canvas must have positive dimensions");
    }
    if (spec.control_points.size() < 2) {
        geometry("a tube needs at least two control points");
    }
    if (!(spec.base_width >= 4.0)) {
        geometry("base width must be at least 4 px");
    }
    if (!(spec.stenosis_depth >= 0.0 && spec.stenosis_depth < 1.0)) {
        geometry("stenosis depth must lie in [0, 1)");
    }
    if (spec.base_width * (1.0 - spec.stenosis_depth) < 2.0) {
        geometry("narrowed width must be at least 2 px");
    }
    if (!(spec.stenosis_center >= 0.0 && spec.stenosis_center <= 1.0)) {
        geometry("stenosis center must lie in [0, 1]");
    }
    if (!(spec.stenosis_extent > 0.0 && spec.stenosis_extent <= 1.0)) {
        geometry("stenosis extent must lie in (0, 1]");
    }
    for (const auto& p : spec.control_points) {
        if (!inside(p, canvas)) {
            geometry("control point outside the canvas");
        }
    }
}

void validate(const VideoSpec& spec, Size canvas)
{
    validate(spec.tube, canvas);
    if (spec.n_frames < 1) {
        geometry("a video needs at least one frame");
    }
    if (static_cast<int>(spec.contrast_envelope.size()) != spec.n_frames) {
        geometry("contrast envelope length must equal n_frames");
    }
    if (!(spec.noise_sigma >= 0.0)) {
        geometry("noise sigma must be non-negative");
    }
    const auto& env = spec.contrast_envelope;
    for (double v : env) {
        if (!(v >= 0.0 && v <= 1.0)) {
            geometry("contrast envelope values must lie in [0, 1]");
        }
    }
    const auto peak = static_cast<std::size_t>(std::max_element(env.begin(), env.end()) - env.begin());
    for (std::size_t i = 1; i < env.size(); ++i) {
        if ((i <= peak && env[i] < env[i - 1]) || (i > peak && env[i] > env[i - 1])) {
            geometry("contrast envelope must be unimodal");
        }
    }
}

RenderedTube render_mask(const TubeSpec& spec, Size canvas)
{
    validate(spec, canvas);
    const auto dense = dense_curve(spec.control_points);
    std::vector<double> cumulative(dense.size(), 0.0);
    for (std::size_t i = 1; i < dense.size(); ++i) {
        cumulative[i] = cumulative[i - 1] + distance(dense[i], dense[i - 1]);
    }
    const double length = cumulative.back();
    if (!(length > 1.0)) {
        geometry("tube centerline is degenerate");
    }

    RenderedTube out;
    out.mask = Mask(canvas);
    out.length = length;
    const auto samples = static_cast<std::size_t>(std::ceil(length / kResampleSpacing));
    out.width_field.reserve(samples + 1);
    std::size_t seg = 0;
    for (std::size_t k = 0; k <= samples; ++k) {
        const double s = std::min(length, static_cast<double>(k) * kResampleSpacing);
        while (seg + 2 < cumulative.size() && cumulative[seg + 1] < s) {
            ++seg;
        }
        const double span = cumulative[seg + 1] - cumulative[seg];
        const double u = span > 0.0 ? (s - cumulative[seg]) / span : 0.0;
        const Vec2 pos = dense[seg] + u * (dense[seg + 1] - dense[seg]);
        const double t = s / length;
        const double w = tube_width(spec, t);
        out.width_field.push_back({t, pos, w});

        const double r = 0.5 * w;
        if (pos.x - r < 0.0 || pos.y - r < 0.0 || pos.x + r > canvas.width - 1.0 ||
            pos.y + r > canvas.height - 1.0) {
            geometry("tube exits the canvas");
        }
        const double r2 = r * r;
        for (int y = static_cast<int>(std::ceil(pos.y - r)); y <= static_cast<int>(std::floor(pos.y + r)); ++y) {
            const double dy = y - pos.y;
            for (int x = static_cast<int>(std::ceil(pos.x - r)); x <= static_cast<int>(std::floor(pos.x + r)); ++x) {
                const double dx = x - pos.x;
                if (dx * dx + dy * dy <= r2) {
                    out.mask.set(x, y);
                }
            }
        }
    }
    return out;
}

std::vector<GrayImage> render_video(const VideoSpec& spec, Size canvas)
{
    validate(spec, canvas);
    const auto tube = render_mask(spec.tube, canvas);
    Rng rng(spec.tube.seed);
    std::vector<GrayImage> frames;
    frames.reserve(static_cast<std::size_t>(spec.n_frames));
    for (int f = 0; f < spec.n_frames; ++f) {
        const double darkening = spec.contrast_envelope[static_cast<std::size_t>(f)] * kPhantomMaxContrast;
        GrayImage img(canvas.width, canvas.height);
        for (int y = 0; y < canvas.height; ++y) {
            for (int x = 0; x < canvas.width; ++x) {
                double v = kPhantomBackground;
                if (tube.mask.test(x, y)) {
                    v -= darkening;
                }
                if (spec.noise_sigma > 0.0) {
                    v += spec.noise_sigma * rng.normal();
                }
                img.set(x, y, static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)));
            }
        }
        frames.push_back(std::move(img));
    }
    return frames;
}

std::vector<double> ramp_plateau_washout(int n_frames)
{
    std::vector<double> env(static_cast<std::size_t>(std::max(n_frames, 0)), 1.0);
    if (n_frames < 4) {
        return env;
    }
    const int q = n_frames / 4;
    for (int i = 0; i < q; ++i) {
        env[static_cast<std::size_t>(i)] = static_cast<double>(i) / q;
        env[static_cast<std::size_t>(n_frames - 1 - i)] = static_cast<double>(i) / q;
    }
    return env;
}

const char* to_string(TubeShape s) noexcept
{
    switch (s) {
    case TubeShape::straight: return "straight";
    case TubeShape::c_curve: return "c";
    case TubeShape::s_curve: return "s";
    }
    return "straight";
}

TubeShape tube_shape_from_string(std::string_view name)
{
    if (name == "straight") return TubeShape::straight;
    if (name == "c" || name == "C") return TubeShape::c_curve;
    if (name == "s" || name == "S") return TubeShape::s_curve;
    throw Error(ErrorCode::config, "unknown tube shape '" + std::string(name) + "' (straight, c, s)");
}

std::vector<Vec2> shape_control_points(TubeShape shape, Size canvas)
{
    const double w = canvas.width;
    const double h = canvas.height;
    std::vector<Vec2> cp;
    switch (shape) {
    case TubeShape::straight:
        for (int i = 0; i <= 2; ++i) {
            const double u = i / 2.0;
            cp.push_back({w * (0.12 + 0.76 * u), h * (0.46 + 0.07 * u)});
        }
        break;
    case TubeShape::c_curve: {
        const Vec2 center{0.5 * w, 0.78 * h};
        const double radius = 0.40 * std::min(w, h);
        for (int i = 0; i <= 6; ++i) {
            const double angle = (200.0 + 140.0 * i / 6.0) * M_PI / 180.0;
            cp.push_back({center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)});
        }
        break;
    }
    case TubeShape::s_curve:
        for (int i = 0; i <= 8; ++i) {
            const double u = i / 8.0;
            cp.push_back({w * (0.12 + 0.76 * u), h * (0.5 + 0.12 * std::sin(2.0 * M_PI * u))});
        }
        break;
    }
    return cp;
}

namespace {

detail::Json tube_json(const TubeSpec& spec)
{
    detail::Json points = detail::Json::array();
    for (const auto& p : spec.control_points) {
        points.push_back(detail::Json::array({p.x, p.y}));
    }
    return detail::Json{{"control_points", std::move(points)},
                        {"base_width", spec.base_width},
                        {"stenosis_center", spec.stenosis_center},
                        {"stenosis_depth", spec.stenosis_depth},
                        {"stenosis_extent", spec.stenosis_extent},
                        {"seed", spec.seed}};
}

TubeSpec tube_from_json(const detail::Json& j)
{
    TubeSpec spec;
    for (const auto& p : j.at("control_points")) {
        if (p.is_array()) {
            spec.control_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        } else {
            spec.control_points.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
        }
    }
    spec.base_width = j.value("base_width", spec.base_width);
    spec.stenosis_center = j.value("stenosis_center", spec.stenosis_center);
    spec.stenosis_depth = j.value("stenosis_depth", spec.stenosis_depth);
    spec.stenosis_extent = j.value("stenosis_extent", spec.stenosis_extent);
    spec.seed = j.value("seed", spec.seed);
    return spec;
}

}  // namespace

TubeSpec tube_spec_from_json(std::string_view text)
{
    try {
        return tube_from_json(detail::parse(text, "tube spec"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format, std::string("tube spec JSON: ") + e.what());
    }
}

std::string to_json(const TubeSpec& spec, int indent) { return tube_json(spec).dump(indent); }

VideoSpec video_spec_from_json(std::string_view text)
{
    try {
        const auto j = detail::parse(text, "video spec");
        VideoSpec spec;
        spec.tube = tube_from_json(j.at("tube"));
        spec.n_frames = j.at("n_frames").get<int>();
        if (j.contains("contrast_envelope")) {
            spec.contrast_envelope = j.at("contrast_envelope").get<std::vector<double>>();
        } else {
            spec.contrast_envelope = ramp_plateau_washout(spec.n_frames);
        }
        spec.noise_sigma = j.value("noise_sigma", 0.0);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format, std::string("video spec JSON: ") + e.what());
    }
}

std::string to_json(const VideoSpec& spec, int indent)
{
    detail::Json j{{"tube", tube_json(spec.tube)},
                   {"n_frames", spec.n_frames},
                   {"contrast_envelope", spec.contrast_envelope},
                   {"noise_sigma", spec.noise_sigma}};
    return j.dump(indent);
}

}  // namespace qca
