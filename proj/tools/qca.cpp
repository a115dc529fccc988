// qca: command-line front end for the angioqca library.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qca/augment.hpp"
#include "qca/error.hpp"
#include "qca/evaluation.hpp"
#include "qca/keyframe.hpp"
#include "qca/phantom.hpp"
#include "qca/pipeline.hpp"
#include "qca/profile.hpp"
#include "qca/raster.hpp"
#include "qca/skeleton.hpp"
#include "qca/stenosis.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 64;

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw qca::Error(qca::ErrorCode::missing_input, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ifstream open_input(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw qca::Error(qca::ErrorCode::missing_input, "cannot open " + path.string());
    }
    return in;
}

template <class F>
void with_output(const std::string& path, F&& body)
{
    if (path.empty() || path == "-") {
        body(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw qca::Error(qca::ErrorCode::io, "cannot write " + path);
    }
    body(out);
}

std::string numbered(const char* prefix, int id, const char* ext)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04d.%s", prefix, id, ext);
    return buf;
}

struct MeasureFlags {
    int prune_threshold = 25;
    std::string prune_mode = "spur";
    bool literal_prune = false;
    int trim = 10;
    int window = 5;

    void add(CLI::App* app, bool with_profile)
    {
        app->add_option("--prune-threshold", prune_threshold, "Minimum branch length in points")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        app->add_option("--prune-mode", prune_mode, "spur or literal")
            ->capture_default_str()
            ->check(CLI::IsMember({"spur", "literal"}));
        app->add_flag("--literal-prune", literal_prune, "Shorthand for --prune-mode literal");
        if (with_profile) {
            app->add_option("--trim", trim, "Centerline points dropped at each end")
                ->capture_default_str()
                ->check(CLI::NonNegativeNumber);
            app->add_option("--window", window, "Moving-average window for tangents")
                ->capture_default_str()
                ->check(CLI::PositiveNumber);
        }
    }

    [[nodiscard]] qca::PruneOptions prune() const
    {
        return {prune_threshold, literal_prune ? qca::PruneMode::literal : qca::prune_mode_from_string(prune_mode)};
    }
};

qca::Centerline centerline_of(const qca::Mask& mask, const qca::PruneOptions& options)
{
    const qca::Skeleton s = qca::prune(qca::thin(qca::largest_component(mask)), options);
    return qca::is_simple_path(s) ? qca::order_centerline(s) : qca::longest_path(s);
}

std::vector<std::string> read_lines(const fs::path& path)
{
    auto in = open_input(path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (!line.empty()) {
            out.push_back(line);
        }
    }
    return out;
}

std::vector<std::pair<int, fs::path>> frame_inputs(const std::string& dir, const std::vector<std::string>& files)
{
    if (files.empty()) {
        return qca::numbered_files(dir, "frame");
    }
    std::vector<std::pair<int, fs::path>> out;
    for (const auto& f : files) {
        const auto id = qca::frame_number(f, "frame");
        out.emplace_back(id ? *id : static_cast<int>(out.size()), f);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantitative coronary angiography: key frames, centerlines, widths and percent stenosis"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // run
    auto* run = app.add_subcommand("run", "Frames and masks in, stenosis report out");
    qca::PipelineConfig cfg;
    std::string config_path;
    std::string input_dir;
    std::vector<std::string> frames;
    std::string mask_dir;
    std::string mask_file;
    std::string scorer = "vesselness";
    std::string scores_file;
    std::string output_dir = cfg.output_dir.string();
    MeasureFlags run_measure;
    run->add_option("--config", config_path, "JSON config; flags given on the command line win");
    run->add_option("--input-dir", input_dir, "Directory of frame_NNNN.pgm images");
    run->add_option("--frames", frames, "Explicit frame files instead of --input-dir");
    run->add_option("--mask-dir", mask_dir, "Directory of mask_NNNN.pgm images");
    run->add_option("--mask-file", mask_file, "One mask used for every selected frame");
    run->add_option("--video-id", cfg.video_id, "Video identifier (default: input directory name)");
    run->add_option("--scorer", scorer, "vesselness or external")
        ->capture_default_str()
        ->check(CLI::IsMember({"vesselness", "external"}));
    run->add_option("--scores-file", scores_file, "frame_id,score CSV for the external scorer");
    run->add_option("--top-k", cfg.top_k, "Key frames kept")->capture_default_str()->check(CLI::PositiveNumber);
    run_measure.add(run, true);
    run->add_option("--k-max", cfg.k_max, "Largest widths averaged per frame")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run->add_option("--k-min", cfg.k_min, "Smallest widths averaged per frame")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run->add_option("--output-dir", output_dir, "Report directory")->capture_default_str();
    run->add_option("--seed", cfg.seed, "Seed recorded with the run")->capture_default_str();
    run->add_option("--threads", cfg.threads, "Scoring threads")->capture_default_str()->check(CLI::PositiveNumber);

    // skeletonize
    auto* skel = app.add_subcommand("skeletonize", "Mask to ordered centerline CSV");
    std::string skel_mask;
    std::string skel_out;
    std::string skel_image;
    MeasureFlags skel_measure;
    skel->add_option("--mask", skel_mask, "Binary mask image")->required();
    skel->add_option("--output", skel_out, "Centerline CSV (default: stdout)");
    skel->add_option("--skeleton-image", skel_image, "Also write the pruned skeleton as an image");
    skel_measure.add(skel, false);

    // profile
    auto* prof = app.add_subcommand("profile", "Mask to width profile CSV");
    std::string prof_mask;
    std::string prof_out;
    MeasureFlags prof_measure;
    prof->add_option("--mask", prof_mask, "Binary mask image")->required();
    prof->add_option("--output", prof_out, "Profile CSV (default: stdout)");
    prof_measure.add(prof, true);

    // assess
    auto* assess_cmd = app.add_subcommand("assess", "Width profile CSVs of one video to a JSON assessment");
    std::vector<std::string> profiles;
    int k_max = 30;
    int k_min = 3;
    int canvas_w = 512;
    int canvas_h = 512;
    assess_cmd->add_option("profiles", profiles, "One to five profile CSVs")->required()->expected(1, 5);
    assess_cmd->add_option("--k-max", k_max, "Largest widths averaged per frame")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    assess_cmd->add_option("--k-min", k_min, "Smallest widths averaged per frame")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    assess_cmd->add_option("--width", canvas_w, "Image width for the lesion box")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    assess_cmd->add_option("--height", canvas_h, "Image height for the lesion box")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    // score
    auto* score = app.add_subcommand("score", "Vesselness key-frame scores as frame_id,score CSV");
    std::string score_dir;
    std::vector<std::string> score_frames;
    std::string score_out;
    unsigned score_threads = 1;
    std::vector<double> sigmas{2.0, 4.0, 6.0};
    score->add_option("--input-dir", score_dir, "Directory of frame_NNNN.pgm images");
    score->add_option("--frames", score_frames, "Explicit frame files");
    score->add_option("--output", score_out, "Scores CSV (default: stdout)");
    score->add_option("--threads", score_threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    score->add_option("--sigmas", sigmas, "Hessian scales in pixels")->capture_default_str();

    // select
    auto* select = app.add_subcommand("select", "Top-k frames of a scores CSV as JSON");
    std::string select_scores;
    int select_k = 5;
    select->add_option("--scores-file", select_scores, "frame_id,score CSV")->required();
    select->add_option("--top-k", select_k, "Frames kept")->capture_default_str()->check(CLI::PositiveNumber);

    // phantom
    auto* phantom = app.add_subcommand("phantom", "Synthetic tube mask, width field and optional video");
    std::string ph_config;
    std::string ph_shape = "straight";
    int ph_w = 512;
    int ph_h = 512;
    qca::TubeSpec tube;
    int ph_frames = 0;
    double ph_noise = 0.0;
    std::string ph_out = ".";
    phantom->add_option("--config", ph_config, "TubeSpec or VideoSpec JSON; flags given on the command line win");
    phantom->add_option("--shape", ph_shape, "straight, c or s")
        ->capture_default_str()
        ->check(CLI::IsMember({"straight", "c", "s"}));
    phantom->add_option("--width", ph_w, "Canvas width")->capture_default_str()->check(CLI::PositiveNumber);
    phantom->add_option("--height", ph_h, "Canvas height")->capture_default_str()->check(CLI::PositiveNumber);
    phantom->add_option("--base-width", tube.base_width, "Tube width in pixels")->capture_default_str();
    phantom->add_option("--depth", tube.stenosis_depth, "Stenosis depth in [0, 1)")->capture_default_str();
    phantom->add_option("--center", tube.stenosis_center, "Stenosis centre as an arc-length fraction")
        ->capture_default_str();
    phantom->add_option("--extent", tube.stenosis_extent, "Stenosis extent as an arc-length fraction")
        ->capture_default_str();
    phantom->add_option("--seed", tube.seed, "Noise seed")->capture_default_str();
    phantom->add_option("--frames", ph_frames, "Frame count; 0 writes the mask only")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    phantom->add_option("--noise", ph_noise, "Gaussian noise sigma in intensity units")->capture_default_str();
    phantom->add_option("--output-dir", ph_out, "Output directory")->capture_default_str();

    // augment
    auto* aug = app.add_subcommand("augment", "Seeded random augmentations of one image");
    std::string aug_in;
    std::string aug_config;
    std::string aug_preset = "classification";
    int aug_count = 1;
    std::uint64_t aug_seed = 0;
    std::string aug_out = ".";
    aug->add_option("--input", aug_in, "Source image")->required();
    aug->add_option("--config", aug_config, "AugmentSpec JSON; --seed given on the command line wins");
    aug->add_option("--preset", aug_preset, "classification or segmentation")
        ->capture_default_str()
        ->check(CLI::IsMember({"classification", "segmentation"}));
    aug->add_option("--count", aug_count, "Number of outputs")->capture_default_str()->check(CLI::PositiveNumber);
    aug->add_option("--seed", aug_seed, "Sampler seed")->capture_default_str();
    aug->add_option("--output-dir", aug_out, "Output directory")->capture_default_str();

    // eval
    auto* eval = app.add_subcommand("eval", "Metrics report as JSON");
    std::string pairs_file;
    std::string labels_file;
    std::string selections_file;
    eval->add_option("--pairs", pairs_file, "patient_id,truth,prediction CSV");
    eval->add_option("--labels", labels_file, "frame_id,predicted,truth CSV of key/non-key labels");
    eval->add_option("--selections", selections_file, "JSON list of {selected, true_keys}");

    // split
    auto* split = app.add_subcommand("split", "Patient-level test set and four folds as JSON");
    std::string ids_file;
    int split_n = 0;
    std::uint64_t split_seed = 0;
    auto* split_source = split->add_option_group("source", "Patient ids");
    split_source->add_option("--ids", ids_file, "File with one patient id per line");
    split_source->add_option("--count", split_n, "Generate ids P0001..PNNNN instead")
        ->check(CLI::NonNegativeNumber);
    split_source->require_option(1);
    split->add_option("--seed", split_seed, "Shuffle seed")->capture_default_str();
    eval->require_option(1, 3);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run) {
            qca::PipelineConfig c;
            if (!config_path.empty()) {
                c = qca::pipeline_config_from_json(read_text(config_path));
            }
            auto given = [&](const char* flag) { return run->count(flag) > 0; };
            if (given("--input-dir")) c.input_dir = input_dir;
            if (given("--frames")) c.frame_files.assign(frames.begin(), frames.end());
            if (given("--mask-dir")) c.mask_dir = mask_dir;
            if (given("--mask-file")) c.mask_file = mask_file;
            if (given("--video-id")) c.video_id = cfg.video_id;
            if (given("--scorer")) c.scorer = qca::scorer_kind_from_string(scorer);
            if (given("--scores-file")) c.scores_file = scores_file;
            if (given("--top-k")) c.top_k = cfg.top_k;
            if (given("--prune-threshold")) c.prune_threshold = run_measure.prune_threshold;
            if (given("--prune-mode")) c.prune_mode = qca::prune_mode_from_string(run_measure.prune_mode);
            if (run_measure.literal_prune) c.prune_mode = qca::PruneMode::literal;
            if (given("--trim")) c.trim = run_measure.trim;
            if (given("--window")) c.window = run_measure.window;
            if (given("--k-max")) c.k_max = cfg.k_max;
            if (given("--k-min")) c.k_min = cfg.k_min;
            if (given("--output-dir") || config_path.empty()) c.output_dir = output_dir;
            if (given("--seed")) c.seed = cfg.seed;
            if (given("--threads")) c.threads = cfg.threads;
            return qca::run_pipeline(c, std::cerr);
        }

        if (*skel) {
            const auto mask = qca::load_mask(skel_mask);
            const auto line = centerline_of(mask, skel_measure.prune());
            with_output(skel_out, [&](std::ostream& out) { qca::write_centerline_csv(out, line); });
            if (!skel_image.empty()) {
                qca::save_mask(qca::Mask::from_points(mask.size(), line.points), skel_image);
            }
            return 0;
        }

        if (*prof) {
            const auto mask = qca::largest_component(qca::load_mask(prof_mask));
            const auto line = centerline_of(mask, prof_measure.prune());
            const auto profile = qca::width_profile(mask, line, {prof_measure.window, prof_measure.trim});
            with_output(prof_out, [&](std::ostream& out) { qca::write_profile_csv(out, profile); });
            return 0;
        }

        if (*assess_cmd) {
            std::vector<qca::FrameWidthStats> stats;
            for (std::size_t i = 0; i < profiles.size(); ++i) {
                auto in = open_input(profiles[i]);
                const auto id = qca::frame_number(profiles[i], "profile");
                stats.push_back(qca::frame_stats(qca::read_profile_csv(in), id ? *id : static_cast<int>(i),
                                                 k_max, k_min));
            }
            std::cout << qca::to_json(qca::assess(stats, {canvas_w, canvas_h})) << '\n';
            return 0;
        }

        if (*score) {
            const auto inputs = frame_inputs(score_dir, score_frames);
            if (inputs.empty()) {
                throw qca::Error(qca::ErrorCode::missing_input, "no frames given");
            }
            std::vector<qca::GrayImage> images;
            qca::ScoreVideoOptions options;
            options.threads = score_threads;
            for (const auto& [id, path] : inputs) {
                options.frame_ids.push_back(id);
                images.push_back(qca::load_gray(path));
            }
            qca::VesselnessParams params;
            params.sigmas = sigmas;
            const qca::VesselnessScorer scorer_fn(params);
            const auto series = qca::score_video(images, std::cref(scorer_fn), options);
            with_output(score_out, [&](std::ostream& out) { qca::write_scores_csv(out, series); });
            return 0;
        }

        if (*select) {
            auto in = open_input(select_scores);
            const auto series = qca::read_scores_csv(in);
            std::cout << qca::selection_to_json(series, qca::select_top_k(series, select_k)) << '\n';
            return 0;
        }

        if (*phantom) {
            const qca::Size canvas{ph_w, ph_h};
            qca::VideoSpec video;
            video.tube.control_points = qca::shape_control_points(qca::tube_shape_from_string(ph_shape), canvas);
            if (!ph_config.empty()) {
                const auto text = read_text(ph_config);
                if (text.find("\"tube\"") != std::string::npos) {
                    video = qca::video_spec_from_json(text);
                } else {
                    video.tube = qca::tube_spec_from_json(text);
                }
                if (phantom->count("--shape") > 0) {
                    video.tube.control_points = qca::shape_control_points(qca::tube_shape_from_string(ph_shape), canvas);
                }
            }
            auto given = [&](const char* flag) { return ph_config.empty() || phantom->count(flag) > 0; };
            if (given("--base-width")) video.tube.base_width = tube.base_width;
            if (given("--depth")) video.tube.stenosis_depth = tube.stenosis_depth;
            if (given("--center")) video.tube.stenosis_center = tube.stenosis_center;
            if (given("--extent")) video.tube.stenosis_extent = tube.stenosis_extent;
            if (given("--seed")) video.tube.seed = tube.seed;
            if (given("--noise")) video.noise_sigma = ph_noise;
            if (given("--frames")) {
                video.n_frames = ph_frames;
                video.contrast_envelope = qca::ramp_plateau_washout(ph_frames);
            }

            const auto rendered = qca::render_mask(video.tube, canvas);
            fs::create_directories(ph_out);
            qca::save_mask(rendered.mask, fs::path(ph_out) / "mask.pgm");
            with_output((fs::path(ph_out) / "width_field.csv").string(), [&](std::ostream& out) {
                out << "t,x,y,width\n";
                char buf[96];
                for (const auto& s : rendered.width_field) {
                    std::snprintf(buf, sizeof buf, "%.6f,%.3f,%.3f,%.4f\n", s.t, s.position.x, s.position.y, s.width);
                    out << buf;
                }
            });
            if (video.n_frames > 0) {
                const auto images = qca::render_video(video, canvas);
                for (std::size_t i = 0; i < images.size(); ++i) {
                    const int id = static_cast<int>(i) + 1;
                    qca::save_gray(images[i], fs::path(ph_out) / numbered("frame", id, "pgm"));
                    qca::save_mask(rendered.mask, fs::path(ph_out) / numbered("mask", id, "pgm"));
                }
            }
            with_output((fs::path(ph_out) / "spec.json").string(),
                        [&](std::ostream& out) { out << qca::to_json(video) << '\n'; });
            return 0;
        }

        if (*aug) {
            qca::AugmentSpec spec =
                aug_preset == "segmentation" ? qca::AugmentSpec::segmentation() : qca::AugmentSpec::classification();
            if (!aug_config.empty()) {
                spec = qca::augment_spec_from_json(read_text(aug_config));
            }
            if (aug_config.empty() || aug->count("--seed") > 0) {
                spec.seed = aug_seed;
            }
            const auto image = qca::load_gray(aug_in);
            qca::AugmentSampler sampler(spec);
            fs::create_directories(aug_out);
            std::string params = "[";
            for (int i = 0; i < aug_count; ++i) {
                const auto p = sampler.next();
                qca::save_gray(qca::augment(image, p), fs::path(aug_out) / numbered("aug", i, "pgm"));
                params += (i ? ",\n" : "\n") + qca::to_json(p, -1);
            }
            with_output((fs::path(aug_out) / "params.json").string(),
                        [&](std::ostream& out) { out << params << "\n]\n"; });
            return 0;
        }

        if (*eval) {
            qca::MetricsReport report;
            if (!pairs_file.empty()) {
                auto in = open_input(pairs_file);
                const auto pairs = qca::read_pairs_csv(in);
                report.errors = qca::mae_sd(pairs);
                report.acc_70 = qca::threshold_accuracy(pairs, qca::kSevereThreshold);
                report.acc_50 = qca::threshold_accuracy(pairs, qca::kModerateThreshold);
            }
            if (!labels_file.empty()) {
                auto in = open_input(labels_file);
                report.classification = qca::classification_metrics(qca::read_labels_csv(in));
            }
            if (!selections_file.empty()) {
                report.top5_precision = qca::top5_precision(qca::selections_from_json(read_text(selections_file)));
            }
            std::cout << qca::to_json(report) << '\n';
            return 0;
        }

        if (*split) {
            std::vector<std::string> ids;
            if (!ids_file.empty()) {
                ids = read_lines(ids_file);
            } else {
                char buf[32];
                for (int i = 1; i <= split_n; ++i) {
                    std::snprintf(buf, sizeof buf, "P%04d", i);
                    ids.emplace_back(buf);
                }
            }
            std::cout << qca::to_json(qca::make_splits(ids, split_seed)) << '\n';
            return 0;
        }
    } catch (const qca::Error& e) {
        std::cerr << e.what() << '\n';
        return e.code() == qca::ErrorCode::missing_input ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
