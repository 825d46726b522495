#pragma once

#include "textrobust/corpus.hpp"
#include "textrobust/model.hpp"
#include "textrobust/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace textrobust {

// Misclassified count / total. Throws ConfigError on empty or mismatched input.
double error_rate(std::span<const int> predicted, std::span<const int> truth);

// (err_perturbed - err_clean) / err_clean. A zero clean error has no defined
// baseline, reported as nullopt rather than infinity.
std::optional<double> relative_difference(double err_perturbed, double err_clean);

struct F1Report {
    std::vector<double> precision;  // per class; 0/0 counted as 0
    std::vector<double> recall;
    std::vector<double> f1;
    double macro_f1 = 0;  // unweighted mean over all schema classes
};

F1Report f1_scores(std::span<const int> predicted, std::span<const int> truth, int num_classes);

struct ConfidenceSplit {
    long high_errors = 0;  // confidence strictly above the threshold
    long low_errors = 0;
    long high_correct = 0;
    long low_correct = 0;

    long total() const { return high_errors + low_errors + high_correct + low_correct; }
};

// Strict inequality: high means confidence > threshold. The four counts
// partition the input.
ConfidenceSplit high_confidence_split(std::span<const Prediction> predictions,
                                      std::span<const int> truth, double threshold);

struct ImpactCompare {
    double multiclass_f1 = 0;
    double binary_f1 = 0;
};

// Macro F1 on the task vs on its binary collapse, with both predictions and
// labels mapped through the schema's binary map (no retraining).
ImpactCompare high_impact_compare(std::span<const int> predicted, std::span<const int> truth,
                                  const TaskSchema& schema);

// Equal-width bins over [0,1], final bin right-closed; counts sum to the
// number of predictions.
std::vector<long> confidence_histogram(std::span<const Prediction> predictions, int bins = 20);

}  // namespace textrobust
