#pragma once

#include "textrobust/corpus.hpp"
#include "textrobust/embedding_store.hpp"
#include "textrobust/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace textrobust {

struct Prediction {
    Vector probs;           // over schema classes, sums to 1
    int label = 0;          // argmax (ensembles: vote winner), ties to lowest index
    Scalar confidence = 0;  // max prob (ensembles: mean member confidence for the winner)
};

struct FeatureLayout {
    int embedding_dim = 0;
    int lexicon_dim = 0;
    int aux_dim = 0;  // 0 when the corpus carries no aux features

    int total() const { return embedding_dim + lexicon_dim + aux_dim; }
    bool operator==(const FeatureLayout&) const = default;
};

FeatureLayout infer_layout(const Dataset& dataset, const EmbeddingStore& store);

// concat(mean token embedding, lexicon features, aux features). Throws
// ConfigError when the example's aux presence or sizes disagree with layout.
Vector featurize(const LabeledExample& example, const EmbeddingStore& store,
                 const FeatureLayout& layout);

struct Hyperparams {
    double learning_rate = 1e-3;  // shallow-net default; 1e-6 preset selectable
    double dropout = 0.2;
    int epochs = 10;
    int hidden_width = 32;
    int batch_size = 32;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

// One hidden layer (tanh), softmax output, inverted dropout on hidden units
// during training, cross-entropy minimized with mini-batch Adam. Embeddings
// stay frozen; the classifier only sees the featurized vector. Deterministic
// per seed. Immutable once trained; prediction is safe to call concurrently.
class ReferenceClassifier {
public:
    ReferenceClassifier(TaskSchema schema, FeatureLayout layout, Hyperparams hp);

    static ReferenceClassifier train(const Dataset& train_set, const EmbeddingStore& store,
                                     Hyperparams hp);

    Prediction predict(const Eigen::Ref<const Vector>& features) const;
    Prediction predict(const LabeledExample& example, const EmbeddingStore& store) const;

    // Summed cross-entropy over the rows of X plus its gradients (dropout
    // off). Exposed so tests can exercise linearity directly.
    struct Gradients {
        Matrix w1, w2;
        Vector b1, b2;
        double loss = 0;
    };
    Gradients loss_and_gradients(const Eigen::Ref<const RowMatrix>& X,
                                 std::span<const int> labels) const;

    // Max relative error between analytic and central-difference gradients
    // for one example, dropout disabled.
    double gradient_check(const Eigen::Ref<const Vector>& features, int label,
                          double fd_step = 1e-5) const;

    const TaskSchema& schema() const { return schema_; }
    const FeatureLayout& layout() const { return layout_; }
    const Hyperparams& hyperparams() const { return hp_; }
    const std::vector<double>& loss_trace() const { return loss_trace_; }

    const Matrix& w1() const { return w1_; }
    const Vector& b1() const { return b1_; }
    const Matrix& w2() const { return w2_; }
    const Vector& b2() const { return b2_; }

    void save(const std::filesystem::path& path) const;
    static ReferenceClassifier load(const std::filesystem::path& path);

private:
    friend class Trainer;

    double mean_loss(const Eigen::Ref<const RowMatrix>& X, std::span<const int> labels) const;

    TaskSchema schema_;
    FeatureLayout layout_;
    Hyperparams hp_;
    Matrix w1_;  // input x hidden
    Vector b1_;
    Matrix w2_;  // hidden x classes
    Vector b2_;
    std::vector<double> loss_trace_;
};

// Numerically stable softmax of a logit vector.
Vector softmax(const Eigen::Ref<const Vector>& logits);

// Plurality vote; ties go to the tied label whose voters hold the highest
// single confidence, then to the lowest class index. Reported probs are the
// member mean; reported confidence is the mean confidence of the members
// that voted for the winner.
Prediction vote_predictions(std::span<const Prediction> members, int num_classes);

struct EnsembleModel {
    std::vector<const ReferenceClassifier*> members;
    std::string tag = "custom";  // EnsC / EnsW / EnsCW / custom

    void validate() const;  // >= 2 members, matching schemas
};

Prediction ensemble_predict(const EnsembleModel& ensemble, const LabeledExample& example,
                            const EmbeddingStore& store);

}  // namespace textrobust
