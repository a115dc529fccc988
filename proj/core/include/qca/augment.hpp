#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qca/random.hpp"
#include "qca/raster.hpp"

namespace qca {

struct Range {
    double low = 0.0;
    double high = 0.0;

    friend bool operator==(const Range&, const Range&) = default;
};

/// Sampling ranges for one augmentation draw. Translations and scale are
/// fractions of the image size; angles are degrees. A disengaged optional
/// disables that transform.
struct AugmentSpec {
    Range rotation{-20.0, 20.0};
    Range shear{-8.0, 8.0};
    Range h_translation{0.0, 0.2};
    Range v_translation{-0.2, 0.2};
    Range scale{0.8, 1.0};
    std::optional<Range> clahe_clip = Range{1.0, 5.0};
    std::optional<Range> sharpen_strength = Range{0.4, 0.6};
    std::uint64_t seed = 0;

    /// Key-frame classifier column (the defaults above).
    static AugmentSpec classification();
    /// Segmentation column: wider affine ranges, no CLAHE or sharpening.
    static AugmentSpec segmentation();
};

struct AugmentParams {
    double rotation = 0.0;
    double shear = 0.0;
    double tx = 0.0;
    double ty = 0.0;
    double scale = 1.0;
    std::optional<double> clahe_clip;
    std::optional<double> sharpen_strength;

    friend bool operator==(const AugmentParams&, const AugmentParams&) = default;
};

/// Throws Error(config) on an inverted range or a non-positive scale.
void validate(const AugmentSpec& spec);

/// Seeded parameter source. Each next() advances the generator by a fixed
/// number of draws. Not thread-safe; use one per task.
class AugmentSampler {
public:
    explicit AugmentSampler(AugmentSpec spec);

    AugmentParams next();

    [[nodiscard]] const AugmentSpec& spec() const noexcept { return spec_; }

private:
    AugmentSpec spec_;
    Rng rng_;
};

inline constexpr std::uint8_t kAugmentFill = 255;

/// Affine warp about the image centre, composed scale -> shear (x, by
/// `shear_deg`) -> rotation (counter-clockwise on screen) -> translation by
/// (tx * width, ty * height). Bilinear sampling; uncovered pixels become 255.
GrayImage apply_affine(const GrayImage& img, double rotation_deg, double shear_deg, double tx, double ty,
                       double scale);

/// Contrast-limited adaptive histogram equalisation on a tiles_x x tiles_y
/// grid. `clip` is a multiple of the uniform bin height; tiles at the right
/// and bottom edges are padded by edge replication.
GrayImage clahe(const GrayImage& img, double clip, int tiles_x = 8, int tiles_y = 8);

GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Unsharp mask: img + strength * (img - blur(img, sigma = 1)), clamped.
GrayImage sharpen(const GrayImage& img, double strength);

/// Affine, then CLAHE and sharpening when present.
GrayImage augment(const GrayImage& img, const AugmentParams& params);

AugmentSpec augment_spec_from_json(std::string_view text);
std::string to_json(const AugmentSpec& spec, int indent = 2);
std::string to_json(const AugmentParams& params, int indent = 2);

}  // namespace qca
