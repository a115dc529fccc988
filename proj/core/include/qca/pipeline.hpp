#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qca/error.hpp"
#include "qca/keyframe.hpp"
#include "qca/profile.hpp"
#include "qca/raster.hpp"
#include "qca/skeleton.hpp"
#include "qca/stenosis.hpp"

namespace qca {

enum class ScorerKind { vesselness, external };

const char* to_string(ScorerKind k) noexcept;
ScorerKind scorer_kind_from_string(std::string_view name);
const char* to_string(PruneMode m) noexcept;
PruneMode prune_mode_from_string(std::string_view name);

struct PipelineConfig {
    std::filesystem::path input_dir;                // holds frame_%04d.pgm
    std::vector<std::filesystem::path> frame_files;  // used instead of input_dir when set
    std::filesystem::path mask_dir;                 // holds mask_%04d.pgm
    std::filesystem::path mask_file;                // one mask for every selected frame
    std::string video_id;                           // defaults to the input directory name
    ScorerKind scorer = ScorerKind::vesselness;
    std::filesystem::path scores_file;              // frame_id,score for the external scorer
    int top_k = 5;
    int prune_threshold = 25;
    PruneMode prune_mode = PruneMode::spur;
    int trim = 10;
    int window = 5;
    int k_max = 30;
    int k_min = 3;
    std::filesystem::path output_dir = ".";
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Throws Error(config) on an out-of-range field or a missing source.
void validate(const PipelineConfig& config);

/// Overlays the keys present in `text` onto `base`.
PipelineConfig pipeline_config_from_json(std::string_view text, PipelineConfig base = {});
std::string to_json(const PipelineConfig& config, int indent = 2);

struct MeasureOptions {
    PruneOptions prune;
    ProfileOptions profile;
    int k_max = 30;
    int k_min = 3;
};

MeasureOptions measure_options(const PipelineConfig& config);

struct FrameMeasurement {
    Centerline centerline;
    WidthProfile profile;
    FrameWidthStats stats;
};

/// Largest component, thinning, pruning, ordering and width profile for one
/// segmented frame. Falls back to the longest path when pruning leaves more
/// than one branch.
FrameMeasurement measure_mask(const Mask& mask, int frame_id, const MeasureOptions& options = {});

/// Mask for a frame id, or nullopt when none is available.
using MaskSource = std::function<std::optional<Mask>(int frame_id)>;

struct VideoAnalysis {
    ScoreSeries scores;
    std::vector<int> selected;                  // selection order
    std::vector<FrameMeasurement> measurements;  // ascending frame_id
    StenosisAssessment assessment;
};

/// Stage-tagged failure: `stage` is one of load, score, select, measure,
/// assess, write.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause);
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Selects the top_k frames of `scores`, measures their masks and assesses
/// the video. Throws StageError.
VideoAnalysis analyze_scores(ScoreSeries scores, const MaskSource& masks, const PipelineConfig& config);

/// Scores `frames` with the vesselness scorer first.
VideoAnalysis analyze_video(std::span<const GrayImage> frames, std::span<const int> frame_ids,
                            const MaskSource& masks, const PipelineConfig& config);

/// {video_id, selected_frames, scores, percent, severity, location, box, frames}
std::string report_json(const VideoAnalysis& analysis, int indent = 2);

/// Mask at 255 with the lesion box outline at 128.
GrayImage lesion_overlay(const Mask& mask, const Box& box);

/// `frame_NNNN` / `mask_NNNN` file stems in a directory, by ascending id.
std::vector<std::pair<int, std::filesystem::path>> numbered_files(const std::filesystem::path& dir,
                                                                 std::string_view prefix);

/// Frame id from a `<prefix>_NNNN.<ext>` name, or nullopt.
std::optional<int> frame_number(const std::filesystem::path& file, std::string_view prefix);

/**
 * Full run from files: writes report.json, profile_NNNN.csv and
 * overlay_NNNN.pgm into output_dir.
 *
 * Returns 0 on success, 2 when an input (frame, mask or score file) is
 * missing, 1 for any other stage failure. Failures are reported on `log`
 * prefixed with the stage name.
 */
int run_pipeline(const PipelineConfig& config, std::ostream& log);

}  // namespace qca
