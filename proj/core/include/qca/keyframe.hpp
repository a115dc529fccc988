#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qca/raster.hpp"

namespace qca {

struct FrameScore {
    int frame_id = 0;
    double score = 0.0;  // [0, 1], higher is a clearer frame

    friend bool operator==(const FrameScore&, const FrameScore&) = default;
};

struct ScoreSeries {
    std::string video_id;
    std::vector<FrameScore> scores;  // strictly increasing frame_id
};

/// Any callable mapping a frame to a quality score in [0, 1]. Must be safe
/// to call concurrently on distinct frames.
using FrameScorer = std::function<double(const GrayImage&)>;

struct VesselnessParams {
    std::vector<double> sigmas{2.0, 4.0, 6.0};
    double threshold_fraction = 0.15;  // of the calibration-tube peak, per scale
    double reference_coverage = 0.05;  // coverage that maps to a score of 1
    double anisotropy_beta = 0.5;
};

/**
 * Classical stand-in for a learned key-frame scorer.
 *
 * At each scale the Hessian of the Gaussian-smoothed frame is computed; the
 * tubularity response for dark-on-bright vessels is
 * sigma^2 * l2 * exp(-(l1/l2)^2 / (2 beta^2)) where |l1| <= |l2| and l2 > 0.
 * Responses are divided by that scale's peak on a calibration tube (a
 * straight black bar of width 2*sqrt(3)*sigma on a white background, the
 * largest response an 8-bit frame can produce at that scale), maximised over
 * scales, and thresholded. The score is the
 * super-threshold pixel fraction over `reference_coverage`, clamped to [0, 1].
 */
class VesselnessScorer {
public:
    explicit VesselnessScorer(VesselnessParams params = {});

    /// Throws Error(too_small) below 32x32.
    double operator()(const GrayImage& frame) const;

    /// Normalised multi-scale response per pixel, row-major.
    std::vector<double> response(const GrayImage& frame) const;

    [[nodiscard]] const VesselnessParams& params() const noexcept { return params_; }
    [[nodiscard]] const std::vector<double>& calibration() const noexcept { return calibration_; }

private:
    std::vector<double> raw_response(const GrayImage& frame, double sigma) const;

    VesselnessParams params_;
    std::vector<double> calibration_;
};

double vesselness_score(const GrayImage& frame, std::span<const double> sigmas = {});

/// The k best frame ids (all when fewer), by descending score then
/// ascending frame_id.
std::vector<int> select_top_k(const ScoreSeries& series, int k = 5);

struct ScoreVideoOptions {
    std::string video_id;
    std::vector<int> frame_ids;  // defaults to 0..n-1
    unsigned threads = 1;
};

/// Scores each frame; output order follows the input. Scorer errors are
/// rethrown with the frame id prefixed.
ScoreSeries score_video(std::span<const GrayImage> frames, const FrameScorer& scorer,
                        const ScoreVideoOptions& options = {});

/// `frame_id,score` with a header row.
void write_scores_csv(std::ostream& out, const ScoreSeries& series);
ScoreSeries read_scores_csv(std::istream& in, std::string video_id = {});

/// [{frame_id, score}, ...] in selection order.
std::string selection_to_json(const ScoreSeries& series, std::span<const int> selected, int indent = 2);

}  // namespace qca
