#include "textrobust/fixture.hpp"

#include "textrobust/io.hpp"
#include "textrobust/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <set>

namespace textrobust {

namespace {

// Pseudo-words over letters with common Cyrillic/Greek lookalikes, so the
// homograph attack has plenty of eligible positions.
std::string make_word(Rng& rng, int min_len, int max_len) {
    static constexpr char kLetters[] = "aceiopsxybdhjknuvt";
    std::string word;
    const int len = min_len + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len - min_len + 1)));
    for (int i = 0; i < len; ++i)
        word += kLetters[rng.below(sizeof(kLetters) - 1)];
    return word;
}

Vector random_unit(Rng& rng, int dim) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    v.normalize();
    return v;
}

}  // namespace

Fixture make_fixture(const FixtureSpec& spec) {
    Fixture fixture;
    Rng rng(derive_seed(spec.seed, "fixture"));

    const TaskSchema schema = TaskSchema::three_way();
    const int n_classes = schema.num_classes();

    // Unique vocabularies per pool.
    std::vector<std::vector<std::string>> class_pool(static_cast<std::size_t>(n_classes));
    std::vector<std::string> noise_pool;
    std::set<std::string> used;
    auto fresh_word = [&] {
        for (;;) {
            std::string w = make_word(rng, 5, 8);
            if (used.insert(w).second) return w;
        }
    };
    for (int c = 0; c < n_classes; ++c)
        for (int i = 0; i < spec.class_vocab; ++i)
            class_pool[static_cast<std::size_t>(c)].push_back(fresh_word());
    for (int i = 0; i < spec.noise_vocab; ++i) noise_pool.push_back(fresh_word());

    // Geometry: trustworthy sits on its own direction; the two deceptive
    // classes share one and differ along a smaller split axis.
    const Vector u_trust = random_unit(rng, spec.dim);
    const Vector u_decep = random_unit(rng, spec.dim);
    const Vector u_split = random_unit(rng, spec.dim);
    std::vector<Vector> centers;
    centers.push_back(2.0 * u_trust);                     // trustworthy
    centers.push_back(2.0 * u_decep + 0.7 * u_split);     // propaganda
    centers.push_back(2.0 * u_decep - 0.7 * u_split);     // disinformation

    EmbeddingStore& store = fixture.model_store;
    store.dim = spec.dim;
    auto add_vector = [&](const std::string& token, const Vector& v) {
        store.token_index.emplace(token, static_cast<int>(store.vocab.size()));
        store.vocab.push_back(token);
    };
    std::vector<Vector> rows;
    for (int c = 0; c < n_classes; ++c) {
        for (const auto& token : class_pool[static_cast<std::size_t>(c)]) {
            Vector v = centers[static_cast<std::size_t>(c)];
            for (int d = 0; d < spec.dim; ++d) v[d] += spec.class_spread * rng.normal();
            add_vector(token, v);
            rows.push_back(std::move(v));
        }
    }
    for (const auto& token : noise_pool) {
        Vector v(spec.dim);
        for (int d = 0; d < spec.dim; ++d) v[d] = rng.normal();
        add_vector(token, v);
        rows.push_back(std::move(v));
    }
    store.vectors.resize(static_cast<Eigen::Index>(rows.size()), spec.dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
        store.vectors.row(static_cast<Eigen::Index>(i)) = rows[i];

    // Word-attack space: same vocabulary, geometry blurred so rank-1
    // neighbors only partially respect the class structure.
    fixture.attack_store = store;
    Rng attack_rng(derive_seed(spec.seed, "attack-space"));
    for (Eigen::Index r = 0; r < fixture.attack_store.vectors.rows(); ++r)
        for (int d = 0; d < spec.dim; ++d)
            fixture.attack_store.vectors(r, d) += spec.attack_space_noise * attack_rng.normal();

    // Lexicons track the two deceptive vocabularies.
    Lexicon hedges{"hedges", {}};
    for (const auto& t : class_pool[1]) hedges.tokens.insert(t);
    Lexicon factives{"factives", {}};
    for (const auto& t : class_pool[2]) factives.tokens.insert(t);
    fixture.lexicons = {std::move(hedges), std::move(factives)};

    // Documents.
    Dataset& corpus = fixture.corpus;
    corpus.schema = schema;
    corpus.tag = Variant::Raw;
    Rng doc_rng(derive_seed(spec.seed, "docs"));
    for (int i = 0; i < spec.docs; ++i) {
        const int true_class = static_cast<int>(doc_rng.below(static_cast<std::uint64_t>(n_classes)));
        const int len = spec.doc_len_min +
                        static_cast<int>(doc_rng.below(
                            static_cast<std::uint64_t>(spec.doc_len_max - spec.doc_len_min + 1)));
        std::vector<std::string> tokens;
        tokens.reserve(static_cast<std::size_t>(len));
        for (int t = 0; t < len; ++t) {
            const double roll = doc_rng.uniform01();
            const std::vector<std::string>* pool;
            if (roll < spec.informative_rate) {
                pool = &class_pool[static_cast<std::size_t>(true_class)];
            } else if (roll < spec.informative_rate + spec.confusion_rate) {
                int other = static_cast<int>(doc_rng.below(static_cast<std::uint64_t>(n_classes - 1)));
                if (other >= true_class) ++other;
                pool = &class_pool[static_cast<std::size_t>(other)];
            } else {
                pool = &noise_pool;
            }
            tokens.push_back((*pool)[doc_rng.below(pool->size())]);
        }

        int label = true_class;
        if (doc_rng.uniform01() < spec.label_noise) {
            int flip = static_cast<int>(doc_rng.below(static_cast<std::uint64_t>(n_classes - 1)));
            if (flip >= label) ++flip;
            label = flip;
        }

        LabeledExample ex;
        char id[16];
        std::snprintf(id, sizeof(id), "doc%05d", i);
        ex.id = id;
        std::string text;
        for (const auto& t : tokens) {
            if (!text.empty()) text += ' ';
            text += t;
        }
        ex.raw_text = text;
        ex.clean_text = preprocess(text);  // identity for these letter-only docs
        ex.tokens = tokenize(ex.clean_text);
        ex.label = label;
        ex.lexicon_features = lexicon_features(ex.tokens, fixture.lexicons);
        corpus.examples.push_back(std::move(ex));
    }
    return fixture;
}

void write_fixture_files(const Fixture& fixture, const std::filesystem::path& dir,
                         const std::filesystem::path& confusables_path) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_embeddings(fixture.model_store, dir / "embeddings.txt");
    write_embeddings(fixture.attack_store, dir / "attack_embeddings.txt");
    write_corpus(fixture.corpus, dir / "corpus.jsonl");
    for (const auto& lex : fixture.lexicons) {
        std::vector<std::string> sorted(lex.tokens.begin(), lex.tokens.end());
        std::sort(sorted.begin(), sorted.end());
        std::string body = "# " + lex.name + " lexicon (synthetic)\n";
        for (const auto& t : sorted) body += t + "\n";
        write_text_file(dir / (lex.name + ".txt"), body);
    }

    nlohmann::ordered_json cfg;
    cfg["task"] = "three_way";
    cfg["corpus"] = "corpus.jsonl";
    cfg["model_embeddings"] = "embeddings.txt";
    cfg["attack_embeddings"] = "attack_embeddings.txt";
    cfg["confusables"] = fs::absolute(confusables_path).string();
    cfg["lexicons"] = {"hedges.txt", "factives.txt"};
    cfg["out_dir"] = "out";
    cfg["test_fraction"] = 0.2;
    cfg["split_seed"] = 101;
    cfg["index"] = {{"n_trees", 16}, {"leaf_size", 32}, {"seed", 7}};
    nlohmann::ordered_json grid;
    grid["defenses"] = {"Tr", "TrHalfC", "TrHalfW", "TrFullC", "TrFullW", "EnsC", "EnsW", "EnsCW"};
    grid["attacks"] = {"Te", "TeC", "TeW", "TeMixed"};
    grid["char_rate"] = 0.25;
    grid["word_rate"] = 0.25;
    grid["neighbor_rank"] = 1;
    grid["confidence_threshold"] = 0.9;
    grid["histogram_bins"] = 20;
    grid["char_seed"] = 11;
    grid["word_seed"] = 12;
    grid["hyperparams"] = {{"learning_rate", 1e-3}, {"dropout", 0.2},   {"epochs", 10},
                           {"hidden_width", 32},    {"batch_size", 32}, {"seed", 1303}};
    cfg["grid"] = grid;
    write_text_file(dir / "run_config.json", cfg.dump(2) + "\n");
}

}  // namespace textrobust
