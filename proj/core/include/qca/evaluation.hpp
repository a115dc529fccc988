#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qca/raster.hpp"

namespace qca {

/// One truth/prediction pair of percent stenosis values.
struct EvalPair {
    std::string patient_id;
    double truth = 0.0;
    double prediction = 0.0;
};

struct SplitPlan {
    std::vector<std::string> test_patients;
    std::vector<std::vector<std::string>> folds;  // always four
    std::uint64_t seed = 0;
};

struct AbsoluteErrorStats {
    double mae = 0.0;
    double sd_ae = 0.0;  // population standard deviation of |truth - prediction|
};

struct ClassificationMetrics {
    double accuracy = 0.0;  // percent
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

struct VideoSelection {
    std::vector<int> selected;
    std::vector<int> true_keys;
};

/// 2 * sum(P * T) / (sum(P) + sum(T)); 1.0 when both masks are empty.
double f1_mask(const Mask& prediction, const Mask& truth);

AbsoluteErrorStats mae_sd(std::span<const EvalPair> pairs);

/// Mean over videos of |selected and true| / |selected| * 100.
double top5_precision(std::span<const VideoSelection> videos);

/// Key frames (true) are the positive class. Zero-denominator ratios are
/// reported as 0 and flagged.
ClassificationMetrics classification_metrics(std::span<const bool> predicted, std::span<const bool> truth);

/// Percent of pairs on the same side of `threshold` (>= counts as above).
double threshold_accuracy(std::span<const EvalPair> pairs, double threshold);

/// Seeded shuffle; the first ceil(n / 5) ids form the test set and the rest
/// are dealt round-robin into four folds.
SplitPlan make_splits(std::span<const std::string> patient_ids, std::uint64_t seed);

/// `patient_id,truth,prediction` with an optional header row.
std::vector<EvalPair> read_pairs_csv(std::istream& in);

/// `frame_id,predicted,truth`; labels are key/non-key or 1/0.
struct LabelColumns {
    std::vector<bool> predicted;
    std::vector<bool> truth;
};
LabelColumns read_labels_csv(std::istream& in);
ClassificationMetrics classification_metrics(const LabelColumns& labels);

/// [{"video_id":..., "selected":[...], "true_keys":[...]}]
std::vector<VideoSelection> selections_from_json(std::string_view text);

std::string to_json(const SplitPlan& plan, int indent = 2);

struct MetricsReport {
    std::optional<ClassificationMetrics> classification;
    std::optional<AbsoluteErrorStats> errors;
    std::optional<double> top5_precision;
    std::optional<double> acc_70;
    std::optional<double> acc_50;
};

/// Keys accuracy, precision, recall, f1, mae, sd_ae, top5_precision, acc_70,
/// acc_50; metrics without input are null.
std::string to_json(const MetricsReport& report, int indent = 2);

}  // namespace qca
