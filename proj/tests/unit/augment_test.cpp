#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qca/augment.hpp"
#include "qca/error.hpp"

using qca::AugmentSpec;
using qca::GrayImage;

namespace {

GrayImage random_image(qca::Rng& rng, int w, int h)
{
    GrayImage img(w, h);
    for (auto& v : img.pixels()) {
        v = static_cast<std::uint8_t>(rng.below(256));
    }
    return img;
}

std::pair<int, int> darkest(const GrayImage& img)
{
    int bx = 0;
    int by = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (img.at(x, y) < img.at(bx, by)) {
                bx = x;
                by = y;
            }
        }
    }
    return {bx, by};
}

}  // namespace

TEST(Sampler, DegenerateRangesAreExact)
{
    AugmentSpec s;
    s.rotation = {7, 7};
    s.shear = {-3, -3};
    s.h_translation = {0.1, 0.1};
    s.v_translation = {0, 0};
    s.scale = {0.9, 0.9};
    s.clahe_clip = qca::Range{2, 2};
    s.sharpen_strength = qca::Range{0.5, 0.5};
    const auto p = qca::AugmentSampler(s).next();
    EXPECT_EQ(p.rotation, 7.0);
    EXPECT_EQ(p.shear, -3.0);
    EXPECT_EQ(p.tx, 0.1);
    EXPECT_EQ(p.ty, 0.0);
    EXPECT_EQ(p.scale, 0.9);
    EXPECT_EQ(p.clahe_clip, 2.0);
    EXPECT_EQ(p.sharpen_strength, 0.5);
}

TEST(Sampler, ClassificationDefaults)
{
    const AugmentSpec s = AugmentSpec::classification();
    EXPECT_EQ(s.rotation, (qca::Range{-20, 20}));
    EXPECT_EQ(s.scale, (qca::Range{0.8, 1.0}));
    EXPECT_EQ(s.clahe_clip, (qca::Range{1, 5}));
    EXPECT_EQ(s.sharpen_strength, (qca::Range{0.4, 0.6}));
    qca::AugmentSampler sampler(s);
    for (int i = 0; i < 500; ++i) {
        const auto p = sampler.next();
        EXPECT_GE(p.rotation, -20.0);
        EXPECT_LE(p.rotation, 20.0);
        EXPECT_GE(p.scale, 0.8);
        EXPECT_LE(p.scale, 1.0);
    }
}

TEST(Sampler, SameSeedSameSequence)
{
    AugmentSpec s;
    s.seed = 1234;
    qca::AugmentSampler a(s);
    qca::AugmentSampler b(s);
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(a.next(), b.next());
    }
}

TEST(Sampler, InvertedRangeRejected)
{
    AugmentSpec s;
    s.rotation = {5, -5};
    EXPECT_THROW(qca::AugmentSampler{s}, qca::Error);
}

TEST(ApplyAffine, IdentityIsBitExact)
{
    qca::Rng rng(1);
    const auto img = random_image(rng, 37, 23);
    EXPECT_EQ(qca::apply_affine(img, 0, 0, 0, 0, 1), img);
}

TEST(ApplyAffine, Rotation90MovesCornerDot)
{
    GrayImage img(41, 41, 255);
    img.set(30, 10, 0);  // (+10, -10) from the centre (20, 20)
    const auto out = qca::apply_affine(img, 90, 0, 0, 0, 1);
    // Counter-clockwise on screen: (dx, dy) -> (dy, -dx) = (-10, -10).
    const auto [x, y] = darkest(out);
    EXPECT_LE(std::abs(x - 10), 1);
    EXPECT_LE(std::abs(y - 10), 1);
}

TEST(ApplyAffine, HalfWidthTranslation)
{
    GrayImage img(100, 20, 255);
    img.set(10, 10, 0);
    const auto out = qca::apply_affine(img, 0, 0, 0.5, 0, 1);
    EXPECT_EQ(darkest(out), (std::pair<int, int>{60, 10}));
    EXPECT_EQ(out.at(10, 10), qca::kAugmentFill);
    EXPECT_EQ(out.at(5, 5), qca::kAugmentFill);  // uncovered after the shift
}

TEST(ApplyAffine, PreservesDimensions)
{
    qca::Rng rng(2);
    const auto img = random_image(rng, 31, 17);
    qca::AugmentSampler sampler(AugmentSpec::segmentation());
    for (int i = 0; i < 10; ++i) {
        const auto out = qca::augment(img, sampler.next());
        EXPECT_EQ(out.size(), img.size());
    }
}

TEST(Clahe, ConstantStaysConstant)
{
    const auto out = qca::clahe(GrayImage(64, 48, 90), 2.0);
    const auto px = out.pixels();
    EXPECT_TRUE(std::all_of(px.begin(), px.end(), [&](auto v) { return v == px[0]; }));
}

TEST(Clahe, WidensLowContrastRamp)
{
    GrayImage img(128, 128);
    for (int y = 0; y < 128; ++y) {
        for (int x = 0; x < 128; ++x) {
            img.set(x, y, static_cast<std::uint8_t>(100 + (x + y) * 20 / 254));
        }
    }
    const auto out = qca::clahe(img, 3.0);
    const auto [in_lo, in_hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    const auto [out_lo, out_hi] = std::minmax_element(out.pixels().begin(), out.pixels().end());
    EXPECT_GT(*out_hi - *out_lo, *in_hi - *in_lo);
}

TEST(Clahe, HugeClipMatchesPlainAdaptiveEqualisation)
{
    qca::Rng rng(6);
    for (auto [w, h] : {std::pair{64, 64}, std::pair{70, 45}, std::pair{17, 9}}) {
        GrayImage img(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                img.set(x, y, static_cast<std::uint8_t>(std::clamp(60 + x + 2 * y + static_cast<int>(rng.below(30)), 0, 255)));
            }
        }
        const auto ours = qca::clahe(img, 1e9);
        const auto ref = oracle::adaptive_equalize(img, 8, 8);
        for (std::size_t i = 0; i < ours.pixels().size(); ++i) {
            EXPECT_LE(std::abs(ours.pixels()[i] - ref.pixels()[i]), 1) << w << "x" << h << " pixel " << i;
        }
    }
}

TEST(Sharpen, ZeroStrengthIsIdentity)
{
    qca::Rng rng(3);
    const auto img = random_image(rng, 20, 20);
    EXPECT_EQ(qca::sharpen(img, 0.0), img);
}

TEST(Sharpen, ConstantImageUnchanged)
{
    const GrayImage img(25, 25, 123);
    EXPECT_EQ(qca::sharpen(img, 0.6), img);
}

TEST(Sharpen, StepEdgeOvershootsAndMatchesClosedForm)
{
    GrayImage img(40, 6);
    std::vector<double> row;
    for (int x = 0; x < 40; ++x) {
        const double v = x < 20 ? 80.0 : 160.0;
        row.push_back(v);
        for (int y = 0; y < 6; ++y) {
            img.set(x, y, static_cast<std::uint8_t>(v));
        }
    }
    const auto out = qca::sharpen(img, 0.5);
    const auto expected = oracle::unsharp_row(row, 0.5, 1.0);
    for (int x = 0; x < 40; ++x) {
        EXPECT_LE(std::abs(out.at(x, 3) - std::clamp(expected[x], 0.0, 255.0)), 1.0) << "x " << x;
    }
    EXPECT_GT(out.at(20, 3), 160);
    EXPECT_LT(out.at(19, 3), 80);
}

TEST(Augment, DeterministicForSeed)
{
    qca::Rng rng(4);
    const auto img = random_image(rng, 48, 48);
    AugmentSpec s = AugmentSpec::classification();
    s.seed = 99;
    qca::AugmentSampler a(s);
    qca::AugmentSampler b(s);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(qca::augment(img, a.next()), qca::augment(img, b.next()));
    }
}

TEST(AugmentJson, PresetAndNullDisable)
{
    const auto seg = qca::augment_spec_from_json(R"({"preset":"segmentation","seed":3})");
    EXPECT_FALSE(seg.clahe_clip.has_value());
    EXPECT_EQ(seg.seed, 3u);
    const auto custom = qca::augment_spec_from_json(R"({"rotation":[-5,5],"sharpen_strength":null})");
    EXPECT_EQ(custom.rotation, (qca::Range{-5, 5}));
    EXPECT_FALSE(custom.sharpen_strength.has_value());
    EXPECT_TRUE(custom.clahe_clip.has_value());
    const auto back = qca::augment_spec_from_json(qca::to_json(custom));
    EXPECT_EQ(qca::to_json(back), qca::to_json(custom));
}
