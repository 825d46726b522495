#include "textrobust/model.hpp"

#include "textrobust/io.hpp"
#include "textrobust/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace textrobust {

namespace {

using json = nlohmann::json;

int argmax_lowest(const Eigen::Ref<const Vector>& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;  // strict: ties keep the lowest index
    return best;
}

json encode_matrix(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()},
            {"data", encode_doubles(m.data(), static_cast<std::size_t>(m.size()))}};
}

Matrix decode_matrix(const json& j) {
    const auto values = decode_doubles(j.at("data").get<std::string>());
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    if (static_cast<Eigen::Index>(values.size()) != rows * cols)
        throw ParseError("parameter payload size mismatch");
    return Eigen::Map<const Matrix>(values.data(), rows, cols);
}

}  // namespace

Vector softmax(const Eigen::Ref<const Vector>& logits) {
    const Scalar m = logits.maxCoeff();
    Vector e = (logits.array() - m).exp();
    return e / e.sum();
}

FeatureLayout infer_layout(const Dataset& dataset, const EmbeddingStore& store) {
    if (dataset.examples.empty()) throw ConfigError("cannot infer layout from an empty dataset");
    FeatureLayout layout;
    layout.embedding_dim = store.dim;
    layout.lexicon_dim = static_cast<int>(dataset.examples.front().lexicon_features.size());
    layout.aux_dim = dataset.examples.front().aux
                         ? static_cast<int>(dataset.examples.front().aux->size())
                         : 0;
    return layout;
}

Vector featurize(const LabeledExample& example, const EmbeddingStore& store,
                 const FeatureLayout& layout) {
    if (store.dim != layout.embedding_dim)
        throw ConfigError("embedding store dimension does not match model layout");
    if (static_cast<int>(example.lexicon_features.size()) != layout.lexicon_dim)
        throw ConfigError("example '" + example.id + "' has " +
                          std::to_string(example.lexicon_features.size()) +
                          " lexicon features, layout expects " + std::to_string(layout.lexicon_dim));
    if (layout.aux_dim > 0) {
        if (!example.aux || static_cast<int>(example.aux->size()) != layout.aux_dim)
            throw ConfigError("example '" + example.id + "' is missing the aux features the layout expects");
    } else if (example.aux) {
        throw ConfigError("example '" + example.id + "' carries aux features but the layout has none");
    }

    Vector out(layout.total());
    out.head(layout.embedding_dim) = embed_tokens(store, example.tokens).mean;
    out.segment(layout.embedding_dim, layout.lexicon_dim) = example.lexicon_features;
    if (layout.aux_dim > 0) out.tail(layout.aux_dim) = *example.aux;
    return out;
}

ReferenceClassifier::ReferenceClassifier(TaskSchema schema, FeatureLayout layout, Hyperparams hp)
    : schema_(std::move(schema)), layout_(layout), hp_(hp) {
    if (schema_.num_classes() < 2) throw ConfigError("classifier needs at least 2 classes");
    if (layout_.total() < 1) throw ConfigError("empty feature layout");
    if (hp_.hidden_width < 1) throw ConfigError("hidden_width must be positive");
    if (!(hp_.dropout >= 0.0 && hp_.dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
    if (hp_.batch_size < 1) throw ConfigError("batch_size must be positive");
    if (hp_.epochs < 0) throw ConfigError("epochs must be >= 0");

    Rng rng(derive_seed(hp_.seed, "init"));
    const int d = layout_.total();
    const int h = hp_.hidden_width;
    const int k = schema_.num_classes();
    const Scalar s1 = 1.0 / std::sqrt(static_cast<Scalar>(d));
    const Scalar s2 = 1.0 / std::sqrt(static_cast<Scalar>(h));
    w1_.resize(d, h);
    for (Eigen::Index c = 0; c < w1_.cols(); ++c)
        for (Eigen::Index r = 0; r < w1_.rows(); ++r) w1_(r, c) = s1 * rng.normal();
    w2_.resize(h, k);
    for (Eigen::Index c = 0; c < w2_.cols(); ++c)
        for (Eigen::Index r = 0; r < w2_.rows(); ++r) w2_(r, c) = s2 * rng.normal();
    b1_ = Vector::Zero(h);
    b2_ = Vector::Zero(k);
}

Prediction ReferenceClassifier::predict(const Eigen::Ref<const Vector>& features) const {
    if (features.size() != layout_.total()) throw ConfigError("feature vector does not match layout");
    const Vector hidden = (w1_.transpose() * features + b1_).array().tanh();
    Prediction pred;
    pred.probs = softmax(w2_.transpose() * hidden + b2_);
    pred.label = argmax_lowest(pred.probs);
    pred.confidence = pred.probs[pred.label];
    return pred;
}

Prediction ReferenceClassifier::predict(const LabeledExample& example,
                                        const EmbeddingStore& store) const {
    return predict(featurize(example, store, layout_));
}

ReferenceClassifier::Gradients ReferenceClassifier::loss_and_gradients(
    const Eigen::Ref<const RowMatrix>& X, std::span<const int> labels) const {
    const auto n = X.rows();
    if (n == 0 || static_cast<std::size_t>(n) != labels.size())
        throw ConfigError("batch and labels disagree");

    const Matrix hidden = ((X * w1_).rowwise() + b1_.transpose()).array().tanh();
    Matrix probs(n, schema_.num_classes());
    double loss = 0;
    const Matrix logits = (hidden * w2_).rowwise() + b2_.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        probs.row(i) = softmax(logits.row(i).transpose()).transpose();
        loss -= std::log(std::max(probs(i, labels[static_cast<std::size_t>(i)]), 1e-300));
    }

    Matrix dlogits = probs;  // softmax + cross-entropy, summed over the batch
    for (Eigen::Index i = 0; i < n; ++i) dlogits(i, labels[static_cast<std::size_t>(i)]) -= 1.0;

    Gradients g;
    g.loss = loss;
    g.w2 = hidden.transpose() * dlogits;
    g.b2 = dlogits.colwise().sum().transpose();
    const Matrix dhidden = (dlogits * w2_.transpose()).array() * (1.0 - hidden.array().square());
    g.w1 = X.transpose() * dhidden;
    g.b1 = dhidden.colwise().sum().transpose();
    return g;
}

double ReferenceClassifier::mean_loss(const Eigen::Ref<const RowMatrix>& X,
                                      std::span<const int> labels) const {
    const Matrix hidden = ((X * w1_).rowwise() + b1_.transpose()).array().tanh();
    const Matrix logits = (hidden * w2_).rowwise() + b2_.transpose();
    double loss = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Vector p = softmax(logits.row(i).transpose());
        loss -= std::log(std::max(p[labels[static_cast<std::size_t>(i)]], 1e-300));
    }
    return loss / static_cast<double>(X.rows());
}

namespace {

struct AdamState {
    Matrix m, v;
    explicit AdamState(Eigen::Index rows, Eigen::Index cols)
        : m(Matrix::Zero(rows, cols)), v(Matrix::Zero(rows, cols)) {}

    template <typename Param, typename Grad>
    void step(Param& param, const Grad& grad, const Hyperparams& hp, long t) {
        m = hp.adam_beta1 * m + (1.0 - hp.adam_beta1) * grad;
        v = hp.adam_beta2 * v + (1.0 - hp.adam_beta2) * grad.array().square().matrix();
        const double bc1 = 1.0 - std::pow(hp.adam_beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(hp.adam_beta2, static_cast<double>(t));
        param.array() -= hp.learning_rate * (m.array() / bc1) /
                         ((v.array() / bc2).sqrt() + hp.adam_eps);
    }
};

}  // namespace

ReferenceClassifier ReferenceClassifier::train(const Dataset& train_set, const EmbeddingStore& store,
                                               Hyperparams hp) {
    if (train_set.examples.empty()) throw ConfigError("training set is empty");
    std::set<int> present;
    for (const auto& ex : train_set.examples) present.insert(ex.label);
    if (present.size() < 2) throw ConfigError("training set has a single class");

    const FeatureLayout layout = infer_layout(train_set, store);
    ReferenceClassifier model(train_set.schema, layout, hp);

    const auto n = static_cast<Eigen::Index>(train_set.size());
    RowMatrix X(n, layout.total());
    std::vector<int> y(train_set.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& ex = train_set.examples[static_cast<std::size_t>(i)];
        X.row(i) = featurize(ex, store, layout).transpose();
        y[static_cast<std::size_t>(i)] = ex.label;
    }

    Rng order_rng(derive_seed(hp.seed, "order"));
    Rng dropout_rng(derive_seed(hp.seed, "dropout"));
    AdamState aw1(model.w1_.rows(), model.w1_.cols()), aw2(model.w2_.rows(), model.w2_.cols());
    AdamState ab1(model.b1_.size(), 1), ab2(model.b2_.size(), 1);

    const double keep = 1.0 - hp.dropout;
    std::vector<Eigen::Index> order(train_set.size());
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

    long step = 0;
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        order_rng.shuffle(order);
        for (Eigen::Index start = 0; start < n; start += hp.batch_size) {
            const Eigen::Index bn = std::min<Eigen::Index>(hp.batch_size, n - start);
            RowMatrix Xb(bn, layout.total());
            std::vector<int> yb(static_cast<std::size_t>(bn));
            for (Eigen::Index i = 0; i < bn; ++i) {
                Xb.row(i) = X.row(order[static_cast<std::size_t>(start + i)]);
                yb[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(order[static_cast<std::size_t>(start + i)])];
            }

            // Forward with inverted dropout on the hidden activations.
            const Matrix hidden_raw = ((Xb * model.w1_).rowwise() + model.b1_.transpose()).array().tanh();
            Matrix mask(bn, hp.hidden_width);
            if (hp.dropout > 0.0) {
                for (Eigen::Index i = 0; i < bn; ++i)
                    for (Eigen::Index j = 0; j < mask.cols(); ++j)
                        mask(i, j) = dropout_rng.uniform01() < keep ? 1.0 / keep : 0.0;
            } else {
                mask.setOnes();
            }
            const Matrix hidden = hidden_raw.array() * mask.array();
            const Matrix logits = (hidden * model.w2_).rowwise() + model.b2_.transpose();

            Matrix dlogits(bn, model.schema_.num_classes());
            double batch_loss = 0;
            for (Eigen::Index i = 0; i < bn; ++i) {
                const Vector p = softmax(logits.row(i).transpose());
                batch_loss -= std::log(std::max(p[yb[static_cast<std::size_t>(i)]], 1e-300));
                dlogits.row(i) = p.transpose();
                dlogits(i, yb[static_cast<std::size_t>(i)]) -= 1.0;
            }
            if (!std::isfinite(batch_loss))
                throw TrainError("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch + 1) + ", batch offset " + std::to_string(start));

            const Matrix gw2 = hidden.transpose() * dlogits;
            const Vector gb2 = dlogits.colwise().sum().transpose();
            const Matrix dhidden =
                ((dlogits * model.w2_.transpose()).array() * mask.array()) *
                (1.0 - hidden_raw.array().square());
            const Matrix gw1 = Xb.transpose() * dhidden;
            const Vector gb1 = dhidden.colwise().sum().transpose();

            ++step;
            aw1.step(model.w1_, gw1, hp, step);
            aw2.step(model.w2_, gw2, hp, step);
            ab1.step(model.b1_, gb1, hp, step);
            ab2.step(model.b2_, gb2, hp, step);

            if (!model.w1_.allFinite() || !model.w2_.allFinite() || !model.b1_.allFinite() ||
                !model.b2_.allFinite())
                throw TrainError("training diverged: non-finite parameters at epoch " +
                                 std::to_string(epoch + 1));
        }
        model.loss_trace_.push_back(model.mean_loss(X, y));
    }
    return model;
}

double ReferenceClassifier::gradient_check(const Eigen::Ref<const Vector>& features, int label,
                                           double fd_step) const {
    RowMatrix X(1, features.size());
    X.row(0) = features.transpose();
    const int labels[1] = {label};
    const Gradients g = loss_and_gradients(X, labels);

    // The loss as a function of a single scratch parameter copy.
    ReferenceClassifier probe = *this;
    auto loss_at = [&]() {
        RowMatrix Xp(1, features.size());
        Xp.row(0) = features.transpose();
        return probe.loss_and_gradients(Xp, labels).loss;
    };

    double max_rel = 0;
    auto check_block = [&](Matrix& param, const Matrix& grad) {
        for (Eigen::Index idx = 0; idx < param.size(); ++idx) {
            const double original = param.data()[idx];
            param.data()[idx] = original + fd_step;
            const double up = loss_at();
            param.data()[idx] = original - fd_step;
            const double down = loss_at();
            param.data()[idx] = original;
            const double fd = (up - down) / (2.0 * fd_step);
            const double analytic = grad.data()[idx];
            const double denom = std::max(std::abs(fd), std::abs(analytic));
            if (denom < 1e-10) continue;  // both effectively zero
            max_rel = std::max(max_rel, std::abs(fd - analytic) / denom);
        }
    };
    auto check_vector = [&](Vector& param, const Vector& grad) {
        for (Eigen::Index idx = 0; idx < param.size(); ++idx) {
            const double original = param[idx];
            param[idx] = original + fd_step;
            const double up = loss_at();
            param[idx] = original - fd_step;
            const double down = loss_at();
            param[idx] = original;
            const double fd = (up - down) / (2.0 * fd_step);
            const double denom = std::max(std::abs(fd), std::abs(grad[idx]));
            if (denom < 1e-10) continue;
            max_rel = std::max(max_rel, std::abs(fd - grad[idx]) / denom);
        }
    };
    check_block(probe.w1_, g.w1);
    check_block(probe.w2_, g.w2);
    check_vector(probe.b1_, g.b1);
    check_vector(probe.b2_, g.b2);
    return max_rel;
}

void ReferenceClassifier::save(const std::filesystem::path& path) const {
    json doc;
    doc["format"] = "textrobust-model";
    doc["version"] = kVersion;
    doc["schema"] = {{"name", schema_.name},
                     {"classes", schema_.classes},
                     {"binary_classes", schema_.binary_classes},
                     {"binary_of", schema_.binary_of}};
    doc["layout"] = {{"embedding_dim", layout_.embedding_dim},
                     {"lexicon_dim", layout_.lexicon_dim},
                     {"aux_dim", layout_.aux_dim}};
    doc["hyperparams"] = {{"learning_rate", hp_.learning_rate},
                          {"dropout", hp_.dropout},
                          {"epochs", hp_.epochs},
                          {"hidden_width", hp_.hidden_width},
                          {"batch_size", hp_.batch_size},
                          {"seed", hp_.seed},
                          {"adam_beta1", hp_.adam_beta1},
                          {"adam_beta2", hp_.adam_beta2},
                          {"adam_eps", hp_.adam_eps}};
    doc["params"] = {{"w1", encode_matrix(w1_)},
                     {"b1", encode_doubles(b1_.data(), static_cast<std::size_t>(b1_.size()))},
                     {"w2", encode_matrix(w2_)},
                     {"b2", encode_doubles(b2_.data(), static_cast<std::size_t>(b2_.size()))}};
    doc["loss_trace"] = loss_trace_;
    write_text_file(path, doc.dump(2) + "\n");
}

ReferenceClassifier ReferenceClassifier::load(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad model file: ") + e.what(), path.string());
    }
    if (doc.value("format", "") != "textrobust-model")
        throw ParseError("not a textrobust model file", path.string());

    TaskSchema schema;
    schema.name = doc.at("schema").at("name").get<std::string>();
    schema.classes = doc.at("schema").at("classes").get<std::vector<std::string>>();
    schema.binary_classes = doc.at("schema").at("binary_classes").get<std::vector<std::string>>();
    schema.binary_of = doc.at("schema").at("binary_of").get<std::vector<int>>();

    FeatureLayout layout;
    layout.embedding_dim = doc.at("layout").at("embedding_dim").get<int>();
    layout.lexicon_dim = doc.at("layout").at("lexicon_dim").get<int>();
    layout.aux_dim = doc.at("layout").at("aux_dim").get<int>();

    Hyperparams hp;
    const auto& h = doc.at("hyperparams");
    hp.learning_rate = h.at("learning_rate").get<double>();
    hp.dropout = h.at("dropout").get<double>();
    hp.epochs = h.at("epochs").get<int>();
    hp.hidden_width = h.at("hidden_width").get<int>();
    hp.batch_size = h.at("batch_size").get<int>();
    hp.seed = h.at("seed").get<std::uint64_t>();
    hp.adam_beta1 = h.at("adam_beta1").get<double>();
    hp.adam_beta2 = h.at("adam_beta2").get<double>();
    hp.adam_eps = h.at("adam_eps").get<double>();

    ReferenceClassifier model(std::move(schema), layout, hp);
    model.w1_ = decode_matrix(doc.at("params").at("w1"));
    const auto b1 = decode_doubles(doc.at("params").at("b1").get<std::string>());
    model.b1_ = Eigen::Map<const Vector>(b1.data(), static_cast<Eigen::Index>(b1.size()));
    model.w2_ = decode_matrix(doc.at("params").at("w2"));
    const auto b2 = decode_doubles(doc.at("params").at("b2").get<std::string>());
    model.b2_ = Eigen::Map<const Vector>(b2.data(), static_cast<Eigen::Index>(b2.size()));
    model.loss_trace_ = doc.value("loss_trace", std::vector<double>{});

    if (model.w1_.rows() != layout.total() || model.w1_.cols() != hp.hidden_width ||
        model.w2_.rows() != hp.hidden_width ||
        model.w2_.cols() != model.schema_.num_classes() ||
        model.b1_.size() != hp.hidden_width || model.b2_.size() != model.schema_.num_classes())
        throw ParseError("parameter shapes do not match layout", path.string());
    return model;
}

void EnsembleModel::validate() const {
    if (members.size() < 2) throw ConfigError("ensemble needs at least 2 members");
    for (const auto* m : members) {
        if (m == nullptr) throw ConfigError("ensemble member is null");
        if (m->schema().classes != members.front()->schema().classes)
            throw ConfigError("ensemble members disagree on the class schema");
    }
}

Prediction vote_predictions(std::span<const Prediction> members, int num_classes) {
    if (members.size() < 2) throw ConfigError("vote needs at least 2 predictions");
    std::vector<int> votes(static_cast<std::size_t>(num_classes), 0);
    std::vector<Scalar> best_conf(static_cast<std::size_t>(num_classes), 0.0);
    Vector mean_probs = Vector::Zero(num_classes);
    for (const auto& p : members) {
        if (p.probs.size() != num_classes) throw ConfigError("prediction has wrong class count");
        votes[static_cast<std::size_t>(p.label)] += 1;
        best_conf[static_cast<std::size_t>(p.label)] =
            std::max(best_conf[static_cast<std::size_t>(p.label)], p.confidence);
        mean_probs += p.probs;
    }
    mean_probs /= static_cast<Scalar>(members.size());

    // Plurality; vote ties fall to the highest member confidence; exact
    // confidence ties fall to the lowest class index.
    int winner = 0;
    for (int c = 1; c < num_classes; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        const auto wc = static_cast<std::size_t>(winner);
        if (votes[cc] > votes[wc] || (votes[cc] == votes[wc] && best_conf[cc] > best_conf[wc]))
            winner = c;
    }

    Scalar conf_sum = 0;
    int conf_n = 0;
    for (const auto& p : members) {
        if (p.label == winner) {
            conf_sum += p.confidence;
            ++conf_n;
        }
    }

    Prediction out;
    out.probs = std::move(mean_probs);
    out.label = winner;
    out.confidence = conf_n > 0 ? conf_sum / static_cast<Scalar>(conf_n) : 0.0;
    return out;
}

Prediction ensemble_predict(const EnsembleModel& ensemble, const LabeledExample& example,
                            const EmbeddingStore& store) {
    ensemble.validate();
    std::vector<Prediction> preds;
    preds.reserve(ensemble.members.size());
    for (const auto* m : ensemble.members) preds.push_back(m->predict(example, store));
    return vote_predictions(preds, ensemble.members.front()->schema().num_classes());
}

}  // namespace textrobust
