#include "qca/keyframe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <numeric>
#include <ostream>
#include <thread>

#include "csv.hpp"
#include "filters.hpp"
#include "json_support.hpp"
#include "qca/error.hpp"

namespace qca {

namespace {

constexpr int kMinFrameSide = 32;
constexpr std::uint8_t kCalibrationBackground = 255;
constexpr int kCalibrationContrast = 255;

GrayImage calibration_tube(double sigma)
{
    const int bar = std::max(2, static_cast<int>(std::lround(2.0 * std::sqrt(3.0) * sigma)));
    const int margin = static_cast<int>(std::ceil(3.0 * sigma)) + 8;
    const int side = bar + 2 * margin;
    GrayImage img(side, side, kCalibrationBackground);
    for (int y = 0; y < side; ++y) {
        for (int x = margin; x < margin + bar; ++x) {
            img.set(x, y, kCalibrationBackground - kCalibrationContrast);
        }
    }
    return img;
}

}  // namespace

VesselnessScorer::VesselnessScorer(VesselnessParams params) : params_(std::move(params))
{
    if (params_.sigmas.empty()) {
        throw Error(ErrorCode::config, "vesselness needs at least one scale");
    }
    for (double s : params_.sigmas) {
        if (!(s > 0.0)) {
            throw Error(ErrorCode::config, "vesselness scales must be positive");
        }
    }
    if (!(params_.reference_coverage > 0.0) || !(params_.threshold_fraction > 0.0) ||
        !(params_.anisotropy_beta > 0.0)) {
        throw Error(ErrorCode::config, "vesselness threshold, coverage and beta must be positive");
    }
    for (double s : params_.sigmas) {
        const auto r = raw_response(calibration_tube(s), s);
        calibration_.push_back(*std::max_element(r.begin(), r.end()));
    }
}

std::vector<double> VesselnessScorer::raw_response(const GrayImage& frame, double sigma) const
{
    const auto img = detail::to_float(frame);
    const auto g0 = detail::gaussian_kernel(sigma, 0);
    const auto g1 = detail::gaussian_kernel(sigma, 1);
    const auto g2 = detail::gaussian_kernel(sigma, 2);
    const auto dxx = detail::convolve(img, g2, g0);
    const auto dyy = detail::convolve(img, g0, g2);
    const auto dxy = detail::convolve(img, g1, g1);

    const double s2 = sigma * sigma;
    const double two_beta2 = 2.0 * params_.anisotropy_beta * params_.anisotropy_beta;
    std::vector<double> out(img.data.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double a = dxx.data[i];
        const double c = dyy.data[i];
        const double b = dxy.data[i];
        const double mean = 0.5 * (a + c);
        const double radius = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        double big = mean + radius;
        double small = mean - radius;
        if (std::abs(small) > std::abs(big)) {
            std::swap(big, small);
        }
        if (big <= 0.0) {
            continue;
        }
        const double rb = small / big;
        out[i] = s2 * big * std::exp(-rb * rb / two_beta2);
    }
    return out;
}

std::vector<double> VesselnessScorer::response(const GrayImage& frame) const
{
    if (frame.width() < kMinFrameSide || frame.height() < kMinFrameSide) {
        throw Error(ErrorCode::too_small, "frame " + std::to_string(frame.width()) + "x" +
                                              std::to_string(frame.height()) +
                                              " is below the 32x32 minimum");
    }
    std::vector<double> best(static_cast<std::size_t>(frame.width()) * frame.height(), 0.0);
    for (std::size_t s = 0; s < params_.sigmas.size(); ++s) {
        const auto r = raw_response(frame, params_.sigmas[s]);
        const double scale = 1.0 / calibration_[s];
        for (std::size_t i = 0; i < best.size(); ++i) {
            best[i] = std::max(best[i], r[i] * scale);
        }
    }
    return best;
}

double VesselnessScorer::operator()(const GrayImage& frame) const
{
    const auto r = response(frame);
    const auto hits = std::count_if(r.begin(), r.end(),
                                    [&](double v) { return v >= params_.threshold_fraction; });
    const double coverage = static_cast<double>(hits) / static_cast<double>(r.size());
    return std::clamp(coverage / params_.reference_coverage, 0.0, 1.0);
}

double vesselness_score(const GrayImage& frame, std::span<const double> sigmas)
{
    VesselnessParams params;
    if (!sigmas.empty()) {
        params.sigmas.assign(sigmas.begin(), sigmas.end());
    }
    return VesselnessScorer(std::move(params))(frame);
}

std::vector<int> select_top_k(const ScoreSeries& series, int k)
{
    std::vector<FrameScore> sorted = series.scores;
    std::stable_sort(sorted.begin(), sorted.end(), [](const FrameScore& a, const FrameScore& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.frame_id < b.frame_id;
    });
    const auto n = std::min<std::size_t>(sorted.size(), static_cast<std::size_t>(std::max(k, 0)));
    std::vector<int> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(sorted[i].frame_id);
    }
    return ids;
}

ScoreSeries score_video(std::span<const GrayImage> frames, const FrameScorer& scorer,
                        const ScoreVideoOptions& options)
{
    if (frames.empty()) {
        throw Error(ErrorCode::no_frames, "video has no frames");
    }
    std::vector<int> ids = options.frame_ids;
    if (ids.empty()) {
        ids.resize(frames.size());
        std::iota(ids.begin(), ids.end(), 0);
    }
    if (ids.size() != frames.size()) {
        throw Error(ErrorCode::shape_mismatch, "frame id list does not match frame count");
    }
    for (std::size_t i = 1; i < ids.size(); ++i) {
        if (ids[i] <= ids[i - 1]) {
            throw Error(ErrorCode::format, "frame ids must be strictly increasing");
        }
    }

    ScoreSeries series;
    series.video_id = options.video_id;
    series.scores.resize(frames.size());
    std::vector<std::exception_ptr> errors(frames.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < frames.size(); i = next++) {
            try {
                const double s = scorer(frames[i]);
                if (!(s >= 0.0 && s <= 1.0)) {
                    throw Error(ErrorCode::out_of_range, "score " + std::to_string(s) + " outside [0, 1]");
                }
                series.scores[i] = {ids[i], s};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::clamp<unsigned>(options.threads, 1u, static_cast<unsigned>(frames.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) {
            continue;
        }
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error& e) {
            throw e.with_context("frame " + std::to_string(ids[i]));
        } catch (const std::exception& e) {
            throw Error(ErrorCode::config, "frame " + std::to_string(ids[i]) + ": " + e.what());
        }
    }
    return series;
}

void write_scores_csv(std::ostream& out, const ScoreSeries& series)
{
    out << "frame_id,score\n";
    char buf[32];
    for (const auto& s : series.scores) {
        std::snprintf(buf, sizeof buf, "%.6f", s.score);
        out << s.frame_id << ',' << buf << '\n';
    }
}

ScoreSeries read_scores_csv(std::istream& in, std::string video_id)
{
    ScoreSeries series;
    series.video_id = std::move(video_id);
    for (const auto& row : csv::read(in, {"frame_id", "score"})) {
        FrameScore s{csv::to_int(row.fields[0], row.line), csv::to_double(row.fields[1], row.line)};
        if (!(s.score >= 0.0 && s.score <= 1.0)) {
            throw Error(ErrorCode::format,
                        "line " + std::to_string(row.line) + ": score must lie in [0, 1]");
        }
        series.scores.push_back(s);
    }
    std::stable_sort(series.scores.begin(), series.scores.end(),
                     [](const FrameScore& a, const FrameScore& b) { return a.frame_id < b.frame_id; });
    for (std::size_t i = 1; i < series.scores.size(); ++i) {
        if (series.scores[i].frame_id == series.scores[i - 1].frame_id) {
            throw Error(ErrorCode::format,
                        "duplicate frame_id " + std::to_string(series.scores[i].frame_id));
        }
    }
    if (series.scores.empty()) {
        throw Error(ErrorCode::empty_input, "score file has no rows");
    }
    return series;
}

std::string selection_to_json(const ScoreSeries& series, std::span<const int> selected, int indent)
{
    detail::Json out = detail::Json::array();
    for (int id : selected) {
        auto it = std::find_if(series.scores.begin(), series.scores.end(),
                               [&](const FrameScore& s) { return s.frame_id == id; });
        if (it == series.scores.end()) {
            throw Error(ErrorCode::missing_input, "selected frame " + std::to_string(id) + " has no score");
        }
        out.push_back(detail::to_json_value(*it));
    }
    return out.dump(indent);
}

}  // namespace qca
