#include "textrobust/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace textrobust {

double error_rate(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.empty()) throw ConfigError("error_rate needs at least one prediction");
    if (predicted.size() != truth.size()) throw ConfigError("prediction/label length mismatch");
    long wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] != truth[i]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

std::optional<double> relative_difference(double err_perturbed, double err_clean) {
    if (err_clean == 0.0) return std::nullopt;
    return (err_perturbed - err_clean) / err_clean;
}

F1Report f1_scores(std::span<const int> predicted, std::span<const int> truth, int num_classes) {
    if (predicted.empty()) throw ConfigError("f1_scores needs at least one prediction");
    if (predicted.size() != truth.size()) throw ConfigError("prediction/label length mismatch");
    if (num_classes < 1) throw ConfigError("num_classes must be positive");

    std::vector<long> tp(static_cast<std::size_t>(num_classes), 0);
    std::vector<long> fp(static_cast<std::size_t>(num_classes), 0);
    std::vector<long> fn(static_cast<std::size_t>(num_classes), 0);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const int p = predicted[i];
        const int t = truth[i];
        if (p < 0 || p >= num_classes || t < 0 || t >= num_classes)
            throw ConfigError("class id out of range");
        if (p == t) {
            ++tp[static_cast<std::size_t>(p)];
        } else {
            ++fp[static_cast<std::size_t>(p)];
            ++fn[static_cast<std::size_t>(t)];
        }
    }

    F1Report report;
    report.precision.resize(static_cast<std::size_t>(num_classes));
    report.recall.resize(static_cast<std::size_t>(num_classes));
    report.f1.resize(static_cast<std::size_t>(num_classes));
    double sum = 0;
    for (int c = 0; c < num_classes; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        const double prec = tp[cc] + fp[cc] == 0
                                ? 0.0
                                : static_cast<double>(tp[cc]) / static_cast<double>(tp[cc] + fp[cc]);
        const double rec = tp[cc] + fn[cc] == 0
                               ? 0.0
                               : static_cast<double>(tp[cc]) / static_cast<double>(tp[cc] + fn[cc]);
        const double f1 = prec + rec == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
        report.precision[cc] = prec;
        report.recall[cc] = rec;
        report.f1[cc] = f1;
        sum += f1;
    }
    report.macro_f1 = sum / static_cast<double>(num_classes);
    return report;
}

ConfidenceSplit high_confidence_split(std::span<const Prediction> predictions,
                                      std::span<const int> truth, double threshold) {
    if (predictions.size() != truth.size()) throw ConfigError("prediction/label length mismatch");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must be in (0, 1)");
    ConfidenceSplit split;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool high = predictions[i].confidence > threshold;
        const bool correct = predictions[i].label == truth[i];
        if (high && !correct) ++split.high_errors;
        else if (!high && !correct) ++split.low_errors;
        else if (high) ++split.high_correct;
        else ++split.low_correct;
    }
    return split;
}

ImpactCompare high_impact_compare(std::span<const int> predicted, std::span<const int> truth,
                                  const TaskSchema& schema) {
    if (!schema.has_binary()) throw ConfigError("schema has no binary collapse");
    ImpactCompare out;
    out.multiclass_f1 = f1_scores(predicted, truth, schema.num_classes()).macro_f1;

    std::vector<int> bin_pred(predicted.size()), bin_truth(truth.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        bin_pred[i] = schema.collapse_class(predicted[i]);
        bin_truth[i] = schema.collapse_class(truth[i]);
    }
    out.binary_f1 =
        f1_scores(bin_pred, bin_truth, static_cast<int>(schema.binary_classes.size())).macro_f1;
    return out;
}

std::vector<long> confidence_histogram(std::span<const Prediction> predictions, int bins) {
    if (bins < 2) throw ConfigError("histogram needs at least 2 bins");
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    for (const auto& p : predictions) {
        const double c = std::clamp(p.confidence, 0.0, 1.0);
        int bin = static_cast<int>(std::floor(c * bins));
        if (bin >= bins) bin = bins - 1;  // confidence exactly 1.0
        ++counts[static_cast<std::size_t>(bin)];
    }
    return counts;
}

}  // namespace textrobust
