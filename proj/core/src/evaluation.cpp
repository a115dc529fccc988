#include "qca/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <set>

#include "csv.hpp"
#include "json_support.hpp"
#include "qca/error.hpp"
#include "qca/random.hpp"

namespace qca {

namespace {

void require_nonempty(std::size_t n, const char* what)
{
    if (n == 0) {
        throw Error(ErrorCode::empty_input, std::string(what) + " needs at least one item");
    }
}

bool parse_label(std::string text, int line)
{
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (text == "1" || text == "key" || text == "true") {
        return true;
    }
    if (text == "0" || text == "non-key" || text == "nonkey" || text == "false") {
        return false;
    }
    throw Error(ErrorCode::format, "line " + std::to_string(line) + ": unknown label '" + text + "'");
}

}  // namespace

double f1_mask(const Mask& prediction, const Mask& truth)
{
    if (prediction.size() != truth.size()) {
        throw Error(ErrorCode::shape_mismatch, "masks differ in size");
    }
    std::size_t both = 0;
    std::size_t p = 0;
    std::size_t t = 0;
    for (int y = 0; y < truth.height(); ++y) {
        for (int x = 0; x < truth.width(); ++x) {
            const bool a = prediction.test(x, y);
            const bool b = truth.test(x, y);
            p += a;
            t += b;
            both += a && b;
        }
    }
    if (p + t == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(both) / static_cast<double>(p + t);
}

AbsoluteErrorStats mae_sd(std::span<const EvalPair> pairs)
{
    require_nonempty(pairs.size(), "MAE");
    const double n = static_cast<double>(pairs.size());
    double sum = 0.0;
    for (const auto& p : pairs) {
        sum += std::abs(p.truth - p.prediction);
    }
    const double mae = sum / n;
    double sq = 0.0;
    for (const auto& p : pairs) {
        const double d = std::abs(p.truth - p.prediction) - mae;
        sq += d * d;
    }
    return {mae, std::sqrt(sq / n)};
}

double top5_precision(std::span<const VideoSelection> videos)
{
    require_nonempty(videos.size(), "top-5 precision");
    double sum = 0.0;
    for (const auto& v : videos) {
        if (v.selected.size() > 5) {
            throw Error(ErrorCode::out_of_range, "a selection holds at most 5 frames");
        }
        if (v.selected.empty()) {
            continue;
        }
        const std::set<int> truth(v.true_keys.begin(), v.true_keys.end());
        const auto hits = std::count_if(v.selected.begin(), v.selected.end(),
                                        [&](int id) { return truth.contains(id); });
        sum += 100.0 * static_cast<double>(hits) / static_cast<double>(v.selected.size());
    }
    return sum / static_cast<double>(videos.size());
}

namespace {

template <class P, class T>
ClassificationMetrics confusion_metrics(const P& predicted, const T& truth)
{
    if (predicted.size() != truth.size()) {
        throw Error(ErrorCode::shape_mismatch, "label lists differ in length");
    }
    require_nonempty(truth.size(), "classification metrics");
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] && truth[i]) {
            ++tp;
        } else if (predicted[i]) {
            ++fp;
        } else if (truth[i]) {
            ++fn;
        } else {
            ++tn;
        }
    }
    ClassificationMetrics m;
    m.accuracy = 100.0 * (tp + tn) / static_cast<double>(truth.size());
    if (tp + fp > 0) {
        m.precision = tp / (tp + fp);
    } else {
        m.precision_undefined = true;
    }
    if (tp + fn > 0) {
        m.recall = tp / (tp + fn);
    } else {
        m.recall_undefined = true;
    }
    if (m.precision + m.recall > 0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.f1_undefined = true;
    }
    return m;
}

}  // namespace

ClassificationMetrics classification_metrics(std::span<const bool> predicted, std::span<const bool> truth)
{
    return confusion_metrics(predicted, truth);
}

ClassificationMetrics classification_metrics(const LabelColumns& labels)
{
    return confusion_metrics(labels.predicted, labels.truth);
}

double threshold_accuracy(std::span<const EvalPair> pairs, double threshold)
{
    require_nonempty(pairs.size(), "threshold accuracy");
    const auto agree = std::count_if(pairs.begin(), pairs.end(), [&](const EvalPair& p) {
        return (p.truth >= threshold) == (p.prediction >= threshold);
    });
    return 100.0 * static_cast<double>(agree) / static_cast<double>(pairs.size());
}

SplitPlan make_splits(std::span<const std::string> patient_ids, std::uint64_t seed)
{
    if (patient_ids.size() < 5) {
        throw Error(ErrorCode::too_small, "a 4:1 split with four folds needs at least 5 patients, got " +
                                              std::to_string(patient_ids.size()));
    }
    const std::set<std::string> unique(patient_ids.begin(), patient_ids.end());
    if (unique.size() != patient_ids.size()) {
        throw Error(ErrorCode::format, "patient ids must be unique");
    }
    std::vector<std::string> ids(patient_ids.begin(), patient_ids.end());
    Rng rng(seed);
    for (std::size_t i = ids.size() - 1; i > 0; --i) {
        std::swap(ids[i], ids[rng.below(i + 1)]);
    }
    SplitPlan plan;
    plan.seed = seed;
    plan.folds.resize(4);
    const std::size_t n_test = (ids.size() + 4) / 5;
    plan.test_patients.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
    for (std::size_t i = n_test; i < ids.size(); ++i) {
        plan.folds[(i - n_test) % 4].push_back(ids[i]);
    }
    return plan;
}

std::vector<EvalPair> read_pairs_csv(std::istream& in)
{
    std::vector<EvalPair> pairs;
    for (const auto& row : csv::read(in, {"patient_id", "truth", "prediction"})) {
        EvalPair p{row.fields[0], csv::to_double(row.fields[1], row.line),
                   csv::to_double(row.fields[2], row.line)};
        for (double v : {p.truth, p.prediction}) {
            if (!(v >= 0.0 && v <= 100.0)) {
                throw Error(ErrorCode::format,
                            "line " + std::to_string(row.line) + ": percent values must lie in [0, 100]");
            }
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

LabelColumns read_labels_csv(std::istream& in)
{
    LabelColumns out;
    for (const auto& row : csv::read(in, {"frame_id", "predicted", "truth"})) {
        out.predicted.push_back(parse_label(row.fields[1], row.line));
        out.truth.push_back(parse_label(row.fields[2], row.line));
    }
    return out;
}

std::vector<VideoSelection> selections_from_json(std::string_view text)
{
    const auto j = detail::parse(text, "selections");
    try {
        std::vector<VideoSelection> out;
        for (const auto& v : j) {
            out.push_back({v.at("selected").get<std::vector<int>>(), v.at("true_keys").get<std::vector<int>>()});
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format, std::string("selections JSON: ") + e.what());
    }
}

std::string to_json(const SplitPlan& plan, int indent)
{
    detail::Json j{{"seed", plan.seed}, {"test_patients", plan.test_patients}, {"folds", plan.folds}};
    return j.dump(indent);
}

std::string to_json(const MetricsReport& r, int indent)
{
    auto opt = [](bool present, double v) { return present ? detail::Json(v) : detail::Json(nullptr); };
    const bool cls = r.classification.has_value();
    const ClassificationMetrics c = r.classification.value_or(ClassificationMetrics{});
    const bool err = r.errors.has_value();
    const AbsoluteErrorStats e = r.errors.value_or(AbsoluteErrorStats{});
    detail::Json j{{"accuracy", opt(cls, c.accuracy)},
                   {"precision", opt(cls, c.precision)},
                   {"recall", opt(cls, c.recall)},
                   {"f1", opt(cls, c.f1)},
                   {"mae", opt(err, e.mae)},
                   {"sd_ae", opt(err, e.sd_ae)},
                   {"top5_precision", opt(r.top5_precision.has_value(), r.top5_precision.value_or(0.0))},
                   {"acc_70", opt(r.acc_70.has_value(), r.acc_70.value_or(0.0))},
                   {"acc_50", opt(r.acc_50.has_value(), r.acc_50.value_or(0.0))}};
    if (cls && (c.precision_undefined || c.recall_undefined || c.f1_undefined)) {
        detail::Json flags = detail::Json::array();
        if (c.precision_undefined) flags.push_back("precision");
        if (c.recall_undefined) flags.push_back("recall");
        if (c.f1_undefined) flags.push_back("f1");
        j["undefined"] = std::move(flags);
    }
    return j.dump(indent);
}

}  // namespace qca
