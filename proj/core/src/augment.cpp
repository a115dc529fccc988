#include "qca/augment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "filters.hpp"
#include "json_support.hpp"
#include "qca/error.hpp"

namespace qca {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

void check_range(const Range& r, const char* name)
{
    if (!(r.low <= r.high) || !std::isfinite(r.low) || !std::isfinite(r.high)) {
        throw Error(ErrorCode::config, std::string(name) + " range must satisfy low <= high");
    }
}

}  // namespace

AugmentSpec AugmentSpec::classification() { return AugmentSpec{}; }

AugmentSpec AugmentSpec::segmentation()
{
    AugmentSpec s;
    s.rotation = {-30.0, 30.0};
    s.shear = {-20.0, 20.0};
    s.h_translation = {-0.05, 0.05};
    s.v_translation = {-0.3, 0.3};
    s.scale = {0.7, 1.3};
    s.clahe_clip.reset();
    s.sharpen_strength.reset();
    return s;
}

void validate(const AugmentSpec& spec)
{
    check_range(spec.rotation, "rotation");
    check_range(spec.shear, "shear");
    check_range(spec.h_translation, "h_translation");
    check_range(spec.v_translation, "v_translation");
    check_range(spec.scale, "scale");
    if (!(spec.scale.low > 0.0)) {
        throw Error(ErrorCode::config, "scale must be positive");
    }
    if (std::abs(spec.shear.low) >= 90.0 || std::abs(spec.shear.high) >= 90.0) {
        throw Error(ErrorCode::config, "shear must lie strictly inside (-90, 90) degrees");
    }
    if (spec.clahe_clip) {
        check_range(*spec.clahe_clip, "clahe_clip");
        if (!(spec.clahe_clip->low > 0.0)) {
            throw Error(ErrorCode::config, "CLAHE clip must be positive");
        }
    }
    if (spec.sharpen_strength) {
        check_range(*spec.sharpen_strength, "sharpen_strength");
        if (spec.sharpen_strength->low < 0.0) {
            throw Error(ErrorCode::config, "sharpen strength must be >= 0");
        }
    }
}

AugmentSampler::AugmentSampler(AugmentSpec spec) : spec_(std::move(spec)), rng_(spec_.seed)
{
    validate(spec_);
}

AugmentParams AugmentSampler::next()
{
    // Every slot is drawn even when disabled so the stream stays aligned.
    std::array<double, 7> u{};
    for (auto& v : u) {
        v = rng_.unit();
    }
    auto pick = [](const Range& r, double unit) { return r.low == r.high ? r.low : r.low + (r.high - r.low) * unit; };
    AugmentParams p;
    p.rotation = pick(spec_.rotation, u[0]);
    p.shear = pick(spec_.shear, u[1]);
    p.tx = pick(spec_.h_translation, u[2]);
    p.ty = pick(spec_.v_translation, u[3]);
    p.scale = pick(spec_.scale, u[4]);
    if (spec_.clahe_clip) {
        p.clahe_clip = pick(*spec_.clahe_clip, u[5]);
    }
    if (spec_.sharpen_strength) {
        p.sharpen_strength = pick(*spec_.sharpen_strength, u[6]);
    }
    return p;
}

GrayImage apply_affine(const GrayImage& img, double rotation_deg, double shear_deg, double tx, double ty,
                       double scale)
{
    if (!(scale > 0.0)) {
        throw Error(ErrorCode::out_of_range, "scale must be positive");
    }
    const double th = rotation_deg * kDegToRad;
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double k = std::tan(shear_deg * kDegToRad);

    // Inverse of R * Sh * S: S^-1 * Sh^-1 * R^-1.
    // R^-1 = [c -s; s c], Sh^-1 = [1 -k; 0 1].
    const double inv_s = 1.0 / scale;
    const double a11 = inv_s * (c - k * s);
    const double a12 = inv_s * (-s - k * c);
    const double a21 = inv_s * s;
    const double a22 = inv_s * c;

    const int w = img.width();
    const int h = img.height();
    const double cx = 0.5 * (w - 1);
    const double cy = 0.5 * (h - 1);
    const double shift_x = tx * w;
    const double shift_y = ty * h;
    constexpr double eps = 1e-9;

    GrayImage out(w, h, kAugmentFill);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = x - cx - shift_x;
            const double dy = y - cy - shift_y;
            const double sx = a11 * dx + a12 * dy + cx;
            const double sy = a21 * dx + a22 * dy + cy;
            if (sx < -eps || sy < -eps || sx > w - 1 + eps || sy > h - 1 + eps) {
                continue;
            }
            const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, w - 1);
            const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, h - 1);
            const int x1 = std::min(x0 + 1, w - 1);
            const int y1 = std::min(y0 + 1, h - 1);
            const double fx = std::clamp(sx - x0, 0.0, 1.0);
            const double fy = std::clamp(sy - y0, 0.0, 1.0);
            const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
            const double bottom = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
            out.set(x, y, to_byte((1.0 - fy) * top + fy * bottom));
        }
    }
    return out;
}

GrayImage clahe(const GrayImage& img, double clip, int tiles_x, int tiles_y)
{
    if (!(clip > 0.0)) {
        throw Error(ErrorCode::out_of_range, "CLAHE clip must be positive");
    }
    if (tiles_x < 1 || tiles_y < 1) {
        throw Error(ErrorCode::out_of_range, "CLAHE needs at least one tile per axis");
    }
    const int w = img.width();
    const int h = img.height();
    const int tw = (w + tiles_x - 1) / tiles_x;
    const int th = (h + tiles_y - 1) / tiles_y;
    const double area = static_cast<double>(tw) * th;
    const double limit = std::max(1.0, clip * area / 256.0);

    std::vector<std::array<std::uint8_t, 256>> luts(static_cast<std::size_t>(tiles_x) * tiles_y);
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            std::array<double, 256> hist{};
            for (int y = ty * th; y < (ty + 1) * th; ++y) {
                for (int x = tx * tw; x < (tx + 1) * tw; ++x) {
                    hist[img.at(std::min(x, w - 1), std::min(y, h - 1))] += 1.0;
                }
            }
            double excess = 0.0;
            for (auto& b : hist) {
                if (b > limit) {
                    excess += b - limit;
                    b = limit;
                }
            }
            const double share = excess / 256.0;
            auto& lut = luts[static_cast<std::size_t>(ty) * tiles_x + tx];
            double cdf = 0.0;
            for (int v = 0; v < 256; ++v) {
                cdf += hist[v] + share;
                lut[v] = to_byte(255.0 * cdf / area);
            }
        }
    }

    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const double gy = (y + 0.5) / th - 0.5;
        const int y0 = static_cast<int>(std::floor(gy));
        const double wy = gy - y0;
        const int ya = std::clamp(y0, 0, tiles_y - 1);
        const int yb = std::clamp(y0 + 1, 0, tiles_y - 1);
        for (int x = 0; x < w; ++x) {
            const double gx = (x + 0.5) / tw - 0.5;
            const int x0 = static_cast<int>(std::floor(gx));
            const double wx = gx - x0;
            const int xa = std::clamp(x0, 0, tiles_x - 1);
            const int xb = std::clamp(x0 + 1, 0, tiles_x - 1);
            const auto v = img.at(x, y);
            auto lut = [&](int i, int j) { return static_cast<double>(luts[static_cast<std::size_t>(j) * tiles_x + i][v]); };
            const double top = (1.0 - wx) * lut(xa, ya) + wx * lut(xb, ya);
            const double bottom = (1.0 - wx) * lut(xa, yb) + wx * lut(xb, yb);
            out.set(x, y, to_byte((1.0 - wy) * top + wy * bottom));
        }
    }
    return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma)
{
    const auto k = detail::gaussian_kernel(sigma, 0);
    const auto blurred = detail::convolve(detail::to_float(img), k, k);
    GrayImage out(img.width(), img.height());
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = to_byte(blurred.data[i]);
    }
    return out;
}

GrayImage sharpen(const GrayImage& img, double strength)
{
    if (!(strength >= 0.0)) {
        throw Error(ErrorCode::out_of_range, "sharpen strength must be >= 0");
    }
    if (strength == 0.0) {
        return img;
    }
    const auto k = detail::gaussian_kernel(1.0, 0);
    const auto src = detail::to_float(img);
    const auto blurred = detail::convolve(src, k, k);
    GrayImage out(img.width(), img.height());
    auto px = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = to_byte(src.data[i] + strength * (src.data[i] - blurred.data[i]));
    }
    return out;
}

GrayImage augment(const GrayImage& img, const AugmentParams& p)
{
    GrayImage out = apply_affine(img, p.rotation, p.shear, p.tx, p.ty, p.scale);
    if (p.clahe_clip) {
        out = clahe(out, *p.clahe_clip);
    }
    if (p.sharpen_strength) {
        out = sharpen(out, *p.sharpen_strength);
    }
    return out;
}

namespace {

detail::Json range_json(const Range& r) { return detail::Json::array({r.low, r.high}); }

Range range_from(const detail::Json& j)
{
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

AugmentSpec augment_spec_from_json(std::string_view text)
{
    const auto j = detail::parse(text, "augment spec");
    try {
        AugmentSpec spec;
        if (j.contains("preset")) {
            const auto preset = j.at("preset").get<std::string>();
            if (preset == "segmentation") {
                spec = AugmentSpec::segmentation();
            } else if (preset != "classification") {
                throw Error(ErrorCode::config, "unknown augment preset '" + preset + "'");
            }
        }
        auto set = [&](const char* key, Range& r) {
            if (j.contains(key)) {
                r = range_from(j.at(key));
            }
        };
        set("rotation", spec.rotation);
        set("shear", spec.shear);
        set("h_translation", spec.h_translation);
        set("v_translation", spec.v_translation);
        set("scale", spec.scale);
        auto set_optional = [&](const char* key, std::optional<Range>& r) {
            if (!j.contains(key)) {
                return;
            }
            if (j.at(key).is_null()) {
                r.reset();
            } else {
                r = range_from(j.at(key));
            }
        };
        set_optional("clahe_clip", spec.clahe_clip);
        set_optional("sharpen_strength", spec.sharpen_strength);
        spec.seed = j.value("seed", spec.seed);
        validate(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format, std::string("augment spec JSON: ") + e.what());
    }
}

std::string to_json(const AugmentSpec& spec, int indent)
{
    detail::Json j{{"rotation", range_json(spec.rotation)},
                   {"shear", range_json(spec.shear)},
                   {"h_translation", range_json(spec.h_translation)},
                   {"v_translation", range_json(spec.v_translation)},
                   {"scale", range_json(spec.scale)},
                   {"clahe_clip", spec.clahe_clip ? range_json(*spec.clahe_clip) : detail::Json(nullptr)},
                   {"sharpen_strength",
                    spec.sharpen_strength ? range_json(*spec.sharpen_strength) : detail::Json(nullptr)},
                   {"seed", spec.seed}};
    return j.dump(indent);
}

std::string to_json(const AugmentParams& p, int indent)
{
    detail::Json j{{"rotation", p.rotation},
                   {"shear", p.shear},
                   {"tx", p.tx},
                   {"ty", p.ty},
                   {"scale", p.scale},
                   {"clahe_clip", p.clahe_clip ? detail::Json(*p.clahe_clip) : detail::Json(nullptr)},
                   {"sharpen_strength",
                    p.sharpen_strength ? detail::Json(*p.sharpen_strength) : detail::Json(nullptr)}};
    return j.dump(indent);
}

}  // namespace qca
