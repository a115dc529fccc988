#include "qca/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json_support.hpp"
#include "qca/error.hpp"

namespace qca {

namespace fs = std::filesystem;

namespace {

constexpr std::uint8_t kOverlayMask = 255;
constexpr std::uint8_t kOverlayBox = 128;

template <class F>
auto in_stage(const char* stage, F&& f)
{
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e);
    } catch (const std::exception& e) {
        throw StageError(stage, Error(ErrorCode::io, e.what()));
    }
}

std::string numbered(const char* prefix, int id, const char* ext)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04d.%s", prefix, id, ext);
    return buf;
}

fs::path find_numbered(const fs::path& dir, const char* prefix, int id)
{
    for (const char* ext : {"pgm", "png"}) {
        auto p = dir / numbered(prefix, id, ext);
        if (fs::exists(p)) {
            return p;
        }
    }
    return {};
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::missing_input, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class T>
void write_file(const fs::path& path, const T& body)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io, "cannot write " + path.string());
    }
    body(out);
    if (!out) {
        throw Error(ErrorCode::io, "write failed for " + path.string());
    }
}

void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw Error(ErrorCode::config, what);
    }
}

}  // namespace

const char* to_string(ScorerKind k) noexcept
{
    return k == ScorerKind::external ? "external" : "vesselness";
}

ScorerKind scorer_kind_from_string(std::string_view name)
{
    if (name == "vesselness") return ScorerKind::vesselness;
    if (name == "external") return ScorerKind::external;
    throw Error(ErrorCode::config, "unknown scorer '" + std::string(name) + "'");
}

const char* to_string(PruneMode m) noexcept
{
    return m == PruneMode::literal ? "literal" : "spur";
}

PruneMode prune_mode_from_string(std::string_view name)
{
    if (name == "spur") return PruneMode::spur;
    if (name == "literal") return PruneMode::literal;
    throw Error(ErrorCode::config, "unknown prune mode '" + std::string(name) + "'");
}

void validate(const PipelineConfig& c)
{
    require(c.top_k >= 1, "top_k must be >= 1");
    require(c.prune_threshold >= 1, "prune_threshold must be >= 1");
    require(c.trim >= 0, "trim must be >= 0");
    require(c.window >= 1 && c.window % 2 == 1, "window must be a positive odd number");
    require(c.k_max >= 1 && c.k_min >= 1, "k_max and k_min must be >= 1");
    require(c.threads >= 1, "threads must be >= 1");
    require(!c.mask_dir.empty() || !c.mask_file.empty(), "a mask_dir or mask_file is required");
    if (c.scorer == ScorerKind::external) {
        require(!c.scores_file.empty(), "the external scorer needs a scores_file");
    } else {
        require(!c.input_dir.empty() || !c.frame_files.empty(), "an input_dir or frame list is required");
    }
}

PipelineConfig pipeline_config_from_json(std::string_view text, PipelineConfig c)
{
    const auto j = detail::parse(text, "pipeline config");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "input_dir") c.input_dir = v.get<std::string>();
            else if (key == "frames") {
                c.frame_files.clear();
                for (const auto& f : v) c.frame_files.emplace_back(f.get<std::string>());
            }
            else if (key == "mask_dir") c.mask_dir = v.get<std::string>();
            else if (key == "mask_file") c.mask_file = v.get<std::string>();
            else if (key == "video_id") c.video_id = v.get<std::string>();
            else if (key == "scorer") c.scorer = scorer_kind_from_string(v.get<std::string>());
            else if (key == "scores_file") c.scores_file = v.get<std::string>();
            else if (key == "top_k") c.top_k = v.get<int>();
            else if (key == "prune_threshold") c.prune_threshold = v.get<int>();
            else if (key == "prune_mode") c.prune_mode = prune_mode_from_string(v.get<std::string>());
            else if (key == "trim") c.trim = v.get<int>();
            else if (key == "window") c.window = v.get<int>();
            else if (key == "k_max") c.k_max = v.get<int>();
            else if (key == "k_min") c.k_min = v.get<int>();
            else if (key == "output_dir") c.output_dir = v.get<std::string>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "threads") c.threads = v.get<unsigned>();
            else throw Error(ErrorCode::config, "unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::config, std::string("pipeline config: ") + e.what());
    }
    return c;
}

std::string to_json(const PipelineConfig& c, int indent)
{
    std::vector<std::string> frames;
    for (const auto& f : c.frame_files) {
        frames.push_back(f.string());
    }
    detail::Json j{{"input_dir", c.input_dir.string()},
                   {"frames", frames},
                   {"mask_dir", c.mask_dir.string()},
                   {"mask_file", c.mask_file.string()},
                   {"video_id", c.video_id},
                   {"scorer", to_string(c.scorer)},
                   {"scores_file", c.scores_file.string()},
                   {"top_k", c.top_k},
                   {"prune_threshold", c.prune_threshold},
                   {"prune_mode", to_string(c.prune_mode)},
                   {"trim", c.trim},
                   {"window", c.window},
                   {"k_max", c.k_max},
                   {"k_min", c.k_min},
                   {"output_dir", c.output_dir.string()},
                   {"seed", c.seed},
                   {"threads", c.threads}};
    return j.dump(indent);
}

MeasureOptions measure_options(const PipelineConfig& c)
{
    return {{c.prune_threshold, c.prune_mode}, {c.window, c.trim}, c.k_max, c.k_min};
}

FrameMeasurement measure_mask(const Mask& mask, int frame_id, const MeasureOptions& options)
{
    const Mask vessel = largest_component(mask);
    if (vessel.count() == 0) {
        throw Error(ErrorCode::empty_input, "mask for frame " + std::to_string(frame_id) + " is empty");
    }
    const Skeleton pruned = prune(thin(vessel), options.prune);
    FrameMeasurement m;
    m.centerline = is_simple_path(pruned) ? order_centerline(pruned) : longest_path(pruned);
    m.profile = width_profile(vessel, m.centerline, options.profile);
    m.stats = frame_stats(m.profile, frame_id, options.k_max, options.k_min);
    return m;
}

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), stage + ": " + cause.message()), stage_(std::move(stage))
{
}

VideoAnalysis analyze_scores(ScoreSeries scores, const MaskSource& masks, const PipelineConfig& config)
{
    VideoAnalysis out;
    out.scores = std::move(scores);
    out.selected = in_stage("select", [&] {
        if (out.scores.scores.empty()) {
            throw Error(ErrorCode::no_frames, "no scored frames");
        }
        return select_top_k(out.scores, config.top_k);
    });

    std::vector<int> ordered = out.selected;
    std::sort(ordered.begin(), ordered.end());
    const MeasureOptions options = measure_options(config);
    Size canvas;
    in_stage("measure", [&] {
        for (int id : ordered) {
            auto mask = masks(id);
            if (!mask) {
                throw Error(ErrorCode::missing_input, "no mask for frame " + std::to_string(id));
            }
            if (canvas.width == 0) {
                canvas = mask->size();
            }
            try {
                out.measurements.push_back(measure_mask(*mask, id, options));
            } catch (const Error& e) {
                throw e.with_context("frame " + std::to_string(id));
            }
        }
        return 0;
    });

    out.assessment = in_stage("assess", [&] {
        std::vector<FrameWidthStats> stats;
        for (const auto& m : out.measurements) {
            stats.push_back(m.stats);
        }
        return assess(stats, canvas);
    });
    return out;
}

VideoAnalysis analyze_video(std::span<const GrayImage> frames, std::span<const int> frame_ids,
                            const MaskSource& masks, const PipelineConfig& config)
{
    auto scores = in_stage("score", [&] {
        const VesselnessScorer scorer;
        ScoreVideoOptions options;
        options.video_id = config.video_id;
        options.frame_ids.assign(frame_ids.begin(), frame_ids.end());
        options.threads = config.threads;
        return score_video(frames, std::cref(scorer), options);
    });
    return analyze_scores(std::move(scores), masks, config);
}

std::string report_json(const VideoAnalysis& a, int indent)
{
    detail::Json j{{"video_id", a.scores.video_id}, {"selected_frames", a.selected}};
    detail::Json scores = detail::Json::array();
    for (const auto& s : a.scores.scores) {
        scores.push_back(detail::to_json_value(s));
    }
    j["scores"] = std::move(scores);
    const detail::Json assessment = detail::to_json_value(a.assessment);
    for (const auto& [key, value] : assessment.items()) {
        j[key] = value;
    }
    return j.dump(indent);
}

GrayImage lesion_overlay(const Mask& mask, const Box& box)
{
    GrayImage img(mask.width(), mask.height(), 0);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.test(x, y)) {
                img.set(x, y, kOverlayMask);
            }
        }
    }
    const int x1 = box.x + box.side - 1;
    const int y1 = box.y + box.side - 1;
    auto mark = [&](int x, int y) {
        if (img.contains(x, y)) {
            img.set(x, y, kOverlayBox);
        }
    };
    for (int i = box.x; i <= x1; ++i) {
        mark(i, box.y);
        mark(i, y1);
    }
    for (int i = box.y; i <= y1; ++i) {
        mark(box.x, i);
        mark(x1, i);
    }
    return img;
}

std::optional<int> frame_number(const fs::path& file, std::string_view prefix)
{
    const std::string stem = file.stem().string();
    if (stem.size() <= prefix.size() + 1 || stem.compare(0, prefix.size(), prefix) != 0 ||
        stem[prefix.size()] != '_') {
        return std::nullopt;
    }
    const char* first = stem.data() + prefix.size() + 1;
    const char* last = stem.data() + stem.size();
    int id = 0;
    const auto [ptr, ec] = std::from_chars(first, last, id);
    if (ec != std::errc{} || ptr != last || id < 0) {
        return std::nullopt;
    }
    return id;
}

std::vector<std::pair<int, fs::path>> numbered_files(const fs::path& dir, std::string_view prefix)
{
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::missing_input, "no directory " + dir.string());
    }
    std::vector<std::pair<int, fs::path>> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (!entry.is_regular_file() || (ext != ".pgm" && ext != ".png")) {
            continue;
        }
        if (auto id = frame_number(entry.path(), prefix)) {
            out.emplace_back(*id, entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].first == out[i - 1].first) {
            throw Error(ErrorCode::format, "two files for " + std::string(prefix) + " " +
                                               std::to_string(out[i].first));
        }
    }
    return out;
}

int run_pipeline(const PipelineConfig& input, std::ostream& log)
{
    try {
        PipelineConfig config = input;
        in_stage("load", [&] {
            validate(config);
            return 0;
        });
        if (config.video_id.empty()) {
            const fs::path base = !config.input_dir.empty() ? config.input_dir : config.scores_file.parent_path();
            config.video_id = fs::absolute(base).lexically_normal().filename().string();
            if (config.video_id.empty()) {
                config.video_id = fs::absolute(base).parent_path().filename().string();
            }
        }

        std::optional<Mask> shared_mask;
        if (!config.mask_file.empty()) {
            shared_mask = in_stage("load", [&] {
                if (!fs::exists(config.mask_file)) {
                    throw Error(ErrorCode::missing_input, "mask file " + config.mask_file.string() + " not found");
                }
                return load_mask(config.mask_file);
            });
        }
        const MaskSource masks = [&](int id) -> std::optional<Mask> {
            if (shared_mask) {
                return shared_mask;
            }
            const fs::path p = find_numbered(config.mask_dir, "mask", id);
            if (p.empty()) {
                return std::nullopt;
            }
            return load_mask(p);
        };

        VideoAnalysis analysis;
        if (config.scorer == ScorerKind::external) {
            auto scores = in_stage("load", [&] {
                std::istringstream in(read_text(config.scores_file));
                return read_scores_csv(in, config.video_id);
            });
            analysis = analyze_scores(std::move(scores), masks, config);
        } else {
            std::vector<int> ids;
            std::vector<GrayImage> frames;
            in_stage("load", [&] {
                std::vector<std::pair<int, fs::path>> files;
                if (!config.frame_files.empty()) {
                    for (const auto& f : config.frame_files) {
                        auto id = frame_number(f, "frame");
                        files.emplace_back(id ? *id : static_cast<int>(files.size()), f);
                    }
                    std::sort(files.begin(), files.end());
                } else {
                    files = numbered_files(config.input_dir, "frame");
                }
                if (files.empty()) {
                    throw Error(ErrorCode::missing_input, "no frame_NNNN images found");
                }
                for (const auto& [id, path] : files) {
                    if (!fs::exists(path)) {
                        throw Error(ErrorCode::missing_input, "frame file " + path.string() + " not found");
                    }
                    ids.push_back(id);
                    frames.push_back(load_gray(path));
                }
                return 0;
            });
            analysis = analyze_video(frames, ids, masks, config);
        }

        in_stage("write", [&] {
            fs::create_directories(config.output_dir);
            write_file(config.output_dir / "report.json",
                       [&](std::ostream& out) { out << report_json(analysis) << '\n'; });
            for (const auto& m : analysis.measurements) {
                const int id = m.stats.frame_id;
                write_file(config.output_dir / numbered("profile", id, "csv"),
                           [&](std::ostream& out) { write_profile_csv(out, m.profile); });
                const auto mask = masks(id);
                save_gray(lesion_overlay(*mask, analysis.assessment.box),
                          config.output_dir / numbered("overlay", id, "pgm"));
            }
            return 0;
        });
        return 0;
    } catch (const StageError& e) {
        log << e.what() << '\n';
        return e.code() == ErrorCode::missing_input ? 2 : 1;
    }
}

}  // namespace qca
