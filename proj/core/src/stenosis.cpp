#include "qca/stenosis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json_support.hpp"
#include "qca/error.hpp"

namespace qca {

const char* to_string(Severity s) noexcept
{
    switch (s) {
    case Severity::mild: return "mild";
    case Severity::moderate: return "moderate";
    case Severity::severe: return "severe";
    }
    return "mild";
}

Severity severity_from_string(std::string_view name)
{
    if (name == "mild") return Severity::mild;
    if (name == "moderate") return Severity::moderate;
    if (name == "severe") return Severity::severe;
    throw Error(ErrorCode::format, "unknown severity '" + std::string(name) + "'");
}

FrameWidthStats frame_stats(const WidthProfile& profile, int frame_id, int k_max, int k_min)
{
    if (profile.empty()) {
        throw Error(ErrorCode::empty_profile, "frame " + std::to_string(frame_id) + " has no widths");
    }
    if (k_max < 1 || k_min < 1) {
        throw Error(ErrorCode::out_of_range, "k_max and k_min must be >= 1");
    }
    std::vector<double> widths;
    widths.reserve(profile.size());
    for (const auto& e : profile.entries) {
        widths.push_back(e.width);
    }
    std::sort(widths.begin(), widths.end());
    const auto n = widths.size();
    const auto top = std::min<std::size_t>(static_cast<std::size_t>(k_max), n);
    const auto bottom = std::min<std::size_t>(static_cast<std::size_t>(k_min), n);

    FrameWidthStats s;
    s.frame_id = frame_id;
    s.max_mean = std::accumulate(widths.end() - static_cast<std::ptrdiff_t>(top), widths.end(), 0.0) /
                 static_cast<double>(top);
    s.min_mean = std::accumulate(widths.begin(), widths.begin() + static_cast<std::ptrdiff_t>(bottom), 0.0) /
                 static_cast<double>(bottom);

    const WidthEntry* smallest = &profile.entries.front();
    for (const auto& e : profile.entries) {
        if (e.width < smallest->width || (e.width == smallest->width && e.index < smallest->index)) {
            smallest = &e;
        }
    }
    s.min_location = smallest->point;
    return s;
}

Severity classify_severity(double percent)
{
    if (!(percent >= 0.0 && percent <= 100.0)) {
        throw Error(ErrorCode::out_of_range, "percent stenosis must lie in [0, 100], got " +
                                                 std::to_string(percent));
    }
    if (percent >= kSevereThreshold) {
        return Severity::severe;
    }
    if (percent >= kModerateThreshold) {
        return Severity::moderate;
    }
    return Severity::mild;
}

Box lesion_box(Point center, Size canvas, int side)
{
    Box box;
    box.side = std::min({side, canvas.width, canvas.height});
    box.x = std::clamp(center.x - box.side / 2, 0, canvas.width - box.side);
    box.y = std::clamp(center.y - box.side / 2, 0, canvas.height - box.side);
    return box;
}

StenosisAssessment assess(std::span<const FrameWidthStats> stats, Size canvas)
{
    if (stats.empty()) {
        throw Error(ErrorCode::no_frames, "no key-frame statistics to assess");
    }
    if (stats.size() > 5) {
        throw Error(ErrorCode::out_of_range,
                    "at most 5 key frames are combined, got " + std::to_string(stats.size()));
    }
    double max_sum = 0.0;
    double min_sum = 0.0;
    for (const auto& s : stats) {
        if (!(s.min_mean > 0.0) || s.max_mean < s.min_mean) {
            throw Error(ErrorCode::out_of_range,
                        "frame " + std::to_string(s.frame_id) + ": need max_mean >= min_mean > 0");
        }
        max_sum += s.max_mean;
        min_sum += s.min_mean;
    }
    const double n = static_cast<double>(stats.size());
    StenosisAssessment a;
    a.per_frame.assign(stats.begin(), stats.end());
    a.percent = std::clamp((1.0 - (min_sum / n) / (max_sum / n)) * 100.0, 0.0, 100.0);
    a.severity = classify_severity(a.percent);

    std::vector<std::size_t> order(stats.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return stats[i].min_mean < stats[j].min_mean;
    });
    a.location = stats[order[(order.size() - 1) / 2]].min_location;
    a.box = lesion_box(a.location, canvas);
    return a;
}

StenosisAssessment aggregate_views(const StenosisAssessment& a, const StenosisAssessment& b)
{
    StenosisAssessment out = b.percent > a.percent ? b : a;
    out.severity = classify_severity(out.percent);
    return out;
}

std::string to_json(const StenosisAssessment& a, int indent)
{
    return detail::to_json_value(a).dump(indent);
}

StenosisAssessment assessment_from_json(std::string_view text)
{
    return detail::assessment_from_json_value(detail::parse(text, "assessment"));
}

namespace detail {

Json parse(std::string_view text, const char* what)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format, std::string(what) + " JSON: " + e.what());
    }
}

Json to_json_value(Point p) { return Json{{"x", p.x}, {"y", p.y}}; }

Point point_from_json(const Json& j) { return {j.at("x").get<int>(), j.at("y").get<int>()}; }

Json to_json_value(const FrameWidthStats& s)
{
    return Json{{"frame_id", s.frame_id},
                {"max_mean", s.max_mean},
                {"min_mean", s.min_mean},
                {"min_location", to_json_value(s.min_location)}};
}

Json to_json_value(const StenosisAssessment& a)
{
    Json frames = Json::array();
    for (const auto& s : a.per_frame) {
        frames.push_back(to_json_value(s));
    }
    return Json{{"percent", a.percent},
                {"severity", to_string(a.severity)},
                {"location", to_json_value(a.location)},
                {"box", Json{{"x", a.box.x}, {"y", a.box.y}, {"side", a.box.side}}},
                {"frames", std::move(frames)}};
}

Json to_json_value(const FrameScore& s) { return Json{{"frame_id", s.frame_id}, {"score", s.score}}; }

StenosisAssessment assessment_from_json_value(const Json& j)
{
    try {
        StenosisAssessment a;
        a.percent = j.at("percent").get<double>();
        a.severity = severity_from_string(j.at("severity").get<std::string>());
        a.location = point_from_json(j.at("location"));
        const auto& box = j.at("box");
        a.box = {box.at("x").get<int>(), box.at("y").get<int>(), box.at("side").get<int>()};
        for (const auto& f : j.at("frames")) {
            FrameWidthStats s;
            s.frame_id = f.at("frame_id").get<int>();
            s.max_mean = f.at("max_mean").get<double>();
            s.min_mean = f.at("min_mean").get<double>();
            s.min_location = point_from_json(f.at("min_location"));
            a.per_frame.push_back(s);
        }
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format, std::string("assessment JSON: ") + e.what());
    }
}

}  // namespace detail

}  // namespace qca
